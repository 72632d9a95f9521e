#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "poldqc/grid.hpp"
#include "poldqc/units.hpp"

namespace poldqc {

/// V(r) = D (1 - exp(-a (r - re)))^2, all in atomic units.
struct MorseParams {
  double depth = 0.0;  // D, hartree
  double range = 0.0;  // a, 1/bohr
  double re = units::hf_bond_length;
  double mass = units::hf_reduced_mass;

  double harmonic_frequency() const;       // omega_e, hartree
  double anharmonicity() const;            // omega_e x_e, hartree
  int bound_state_count() const;           // floor(sqrt(2 m D)/a - 1/2)
  double level(int v) const;               // E_v above the well bottom, hartree
};

void validate(const MorseParams& p);

/// Morse parameters whose first two analytic spacings are omega1 and omega2 (cm^-1).
/// Throws AnharmonicityError unless omega1 > omega2 > 0.
MorseParams fit_morse_to_transitions(double omega1_cm, double omega2_cm, double mass,
                                     double re = units::hf_bond_length);

double morse_potential(double r, const MorseParams& p);

enum class DipoleForm { Linear, Mecke };

/// Molecular dipole along the cavity polarization. The nuclear-frame part is
/// mu0 + slope (r - re) (linear) or charge * r * exp(-r / decay_length) (mecke).
/// The electronic part is a two-level system with gap `electronic_gap` whose
/// sigma_x carries `transition_dipole`.
struct DipoleModel {
  DipoleForm form = DipoleForm::Linear;
  double mu0 = 0.0;
  double slope = 0.0;
  double re = units::hf_bond_length;
  double charge = 0.0;
  double decay_length = 1.0;
  double electronic_gap = 0.35;
  double transition_dipole = 0.35;
};

void validate(const DipoleModel& d, double omega_c);

double nuclear_dipole(double r, const DipoleModel& m);

/// Mecke parameters (charge, decay length) matching value mu0 and slope at re.
DipoleModel mecke_from_linear(const DipoleModel& linear);

struct CavityMode {
  double omega_c = 0.0;  // hartree
  double lambda0 = 0.0;  // single-molecule coupling strength, atomic units
  int n_mol = 1;

  /// Collective scaling lambda0 / sqrt(n_mol).
  double lambda_c() const;
  /// 4 pi / lambda_c^2 (infinite when uncoupled).
  double mode_volume() const;
};

void validate(const CavityMode& c);

enum class SurfaceVariant { FieldFree, Linear, Full, ETC };

std::string to_string(SurfaceVariant v);
SurfaceVariant parse_variant(const std::string& text);

struct SCFState {
  std::vector<double> mixing_angles;  // phi_i with <sigma_x> = sin(phi_i)
  std::vector<double> dipoles;        // <mu_i>, atomic units
  double energy = 0.0;                // hartree, excludes 1/2 wc^2 qc^2
  int iterations = 0;
  double residual = 0.0;
  std::vector<double> energy_history;  // mean-field energy after each sweep
};

/// Two-level mean-field electronic ground state of n molecules at bond lengths
/// `r` and photon displacement `qc`. Throws ConvergenceError after max_iter sweeps.
SCFState scf_electronic_ground(std::span<const double> r, double qc, const CavityMode& cav, const MorseParams& morse,
                               const DipoleModel& dip, SurfaceVariant variant, double tol = 1e-12,
                               int max_iter = 200);

using Metadata = std::map<std::string, std::string>;

/// Potential and dipole surfaces tabulated on a product grid (qc last).
struct SurfaceSet {
  ProductGrid grid;
  SurfaceVariant variant = SurfaceVariant::Full;
  Eigen::VectorXd potential;  // hartree, global field-free minimum subtracted
  Eigen::VectorXd dipole;     // atomic units, total matter dipole
  Metadata metadata;

  /// Cavity frequency in hartree from metadata, or 0 when absent.
  double omega_c() const;
  int n_mol() const { return static_cast<int>(grid.n_molecular_axes()); }
};

/// The grid may omit the qc axis only for the field-free variant (matter-only surfaces).
SurfaceSet build_surface_set(const ProductGrid& grid, const MorseParams& morse, const DipoleModel& dip,
                             const CavityMode& cav, SurfaceVariant variant);

}  // namespace poldqc
