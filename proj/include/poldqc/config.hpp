#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "poldqc/dqc.hpp"
#include "poldqc/grid.hpp"
#include "poldqc/model.hpp"
#include "poldqc/relax.hpp"

namespace poldqc {

/// Slope of the linear dipole (au/bohr) that gives a 60 cm^-1 first Rabi
/// splitting for one HF molecule at lambda0 = 0.03 on the default grid.
inline constexpr double kCalibratedDipoleSlope = 0.38454944380485712;

struct MoleculeConfig {
  double omega1_cm = 0.0;
  double omega2_cm = 0.0;
  double mass_au = units::hf_reduced_mass;
  double re_bohr = units::hf_bond_length;
  DipoleForm dipole_form = DipoleForm::Linear;
  double dipole_mu0_au = 0.7;
  double dipole_slope_au = kCalibratedDipoleSlope;
  std::optional<double> mecke_charge_au;
  std::optional<double> mecke_rstar_bohr;
  double electronic_gap_au = 0.35;
  double transition_dipole_au = 0.35;
};

struct CavityConfig {
  std::optional<double> omega_c_cm;  // defaults to omega1_cm
  double lambda0_au = 0.0;
  int n_mol = 1;
};

struct GridConfig {
  int r_points = 128;
  double r_min_bohr = 0.9;
  double r_max_bohr = 3.6;
  int qc_points = 64;
  double qc_min_au = -45.0;
  double qc_max_au = 45.0;
};

struct SpectrumConfig {
  double gamma_cm = 10.0;
  FrequencyAxis omega2{8200.0, 1.0, 601};
  FrequencyAxis omega3{4000.0, 1.0, 451};
};

struct RunConfig {
  MoleculeConfig molecule;
  CavityConfig cavity;
  GridConfig grid;
  RelaxationConfig solver;
  SpectrumConfig spectrum;
  SurfaceVariant variant = SurfaceVariant::Full;

  MorseParams morse() const;
  DipoleModel dipole() const;
  CavityMode cavity_mode() const;
  ProductGrid product_grid() const;
  double omega_c_cm() const { return cavity.omega_c_cm.value_or(molecule.omega1_cm); }
};

/// `[section]` headers and `key = value` lines; '#' starts a comment.
/// Throws ParseError (with line) for syntax errors, unknown keys, missing
/// required keys and unit-suffix mismatches, and ValidationError for values
/// outside the owning module's domain.
RunConfig parse_config(std::istream& in);
RunConfig parse_config_file(const std::string& path);

/// Canonical text form of every key; parse_config(write_config(c)) == c.
void write_config(std::ostream& out, const RunConfig& cfg);

/// Checks every derived model object. Throws ValidationError.
void validate(const RunConfig& cfg);

/// "desk": 96 x 96 x 48 for two molecules, defaults for one. "paper": 128 per r axis, 64 for qc.
void apply_preset(RunConfig& cfg, const std::string& preset);

}  // namespace poldqc
