#pragma once

#include "poldqc/grid.hpp"
#include "poldqc/model.hpp"
#include "poldqc/relax.hpp"

namespace poldqc {

inline RelaxationConfig calibration_relax_config() {
  RelaxationConfig c;
  c.n_states = 3;
  c.energy_tol = 1e-11;
  return c;
}

struct CalibrationOptions {
  ProductGrid grid;  // r1 x qc; a default grid is used when empty
  RelaxationConfig relax = calibration_relax_config();
  SurfaceVariant variant = SurfaceVariant::Full;
  double slope_tolerance = 1e-6;  // relative bracket width at termination
  int max_evaluations = 40;
};

/// Default single-molecule grid: r in [0.9, 3.6] bohr (128 points), qc in [-45, 45] (64 points).
ProductGrid default_single_molecule_grid(double mass = units::hf_reduced_mass);

/// UP(1) - LP(1) in cm^-1 from the two lowest excited states of a one-molecule solve.
double first_rabi_splitting_cm(const CavityMode& cav, const MorseParams& morse, const DipoleModel& dip,
                               const CalibrationOptions& opt = {});

/// First-order estimate 2 lambda_c sqrt(omega_c / 2) slope / sqrt(2 m omega_c), in hartree.
double first_order_rabi(const CavityMode& cav, const MorseParams& morse, double slope);

/// Dipole model whose slope reproduces the target first Rabi splitting.
/// Throws CalibrationError when no bracket is found or the coupling vanishes.
DipoleModel calibrate_dipole_slope(double target_rabi_cm, const CavityMode& cav, const MorseParams& morse,
                                   const DipoleModel& tmpl, const CalibrationOptions& opt = {});

}  // namespace poldqc
