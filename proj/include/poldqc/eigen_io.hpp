#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "poldqc/relax.hpp"

namespace poldqc {

// Eigen result file (text):
//
//   #POLDQC-EIGEN v1
//   #key=value                 (metadata)
//   #axis <label> <n> <min> <max> <mass>
//   #omega_ref_au <value>
//   #energies_hartree
//   <E_i>                      (one per line)
//   #dipoles_au
//   <mu_i0> <mu_i1> ...        (one row per line)
//   #partition g=<i> e=<i,j,...> f=<i,j,...>
//
// Wavefunction sidecar (binary): a 64-byte space-padded text header
// "POLDQC-WF v1 <n_states> <total_points>" ending in '\n', then
// n_states * total_points little-endian doubles (real amplitudes, grid-normalized).

void write_eigen_solution(std::ostream& out, const EigenSolution& sol);
EigenSolution read_eigen_solution(std::istream& in);

void write_wavefunctions(std::ostream& out, const std::vector<Wavefunction>& states);
std::vector<Wavefunction> read_wavefunctions(std::istream& in, const ProductGrid& grid);

std::string wavefunction_sidecar_path(const std::string& eigen_path);

/// Writes the eigen file and, when states are present and `sidecar` is set,
/// the wavefunction sidecar next to it.
void save_eigen_solution(const EigenSolution& sol, const std::string& path, bool sidecar = true);

/// Reads the eigen file and the sidecar if one exists.
EigenSolution load_eigen_solution(const std::string& path);

}  // namespace poldqc
