#pragma once

// Atomic units (hbar = 1) are used everywhere inside the library.
// Wavenumbers in cm^-1 only appear at I/O boundaries.

namespace poldqc::units {

inline constexpr double hartree_to_cm = 219474.6313632;
inline constexpr double amu_to_au = 1822.888486209;

/// Reduced mass of H-F in atomic units (0.957055 amu).
inline constexpr double hf_reduced_mass = 1744.59;
/// H-F equilibrium bond length in bohr.
inline constexpr double hf_bond_length = 1.7329;

constexpr double cm_to_hartree(double cm) { return cm / hartree_to_cm; }
constexpr double hartree_to_wavenumber(double e) { return e * hartree_to_cm; }

}  // namespace poldqc::units
