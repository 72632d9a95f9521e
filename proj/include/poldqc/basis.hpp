#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "poldqc/grid.hpp"
#include "poldqc/model.hpp"
#include "poldqc/relax.hpp"

namespace poldqc {

/// |v, n> for one molecule or |v_s v_a, n> for two.
struct BareLabel {
  std::vector<int> v;
  int n = 0;

  int matter_quanta() const;
  int total_quanta() const { return matter_quanta() + n; }
  std::string text() const;
  bool operator==(const BareLabel&) const = default;
};

struct BareState {
  BareLabel label;
  Wavefunction function;
  double energy = 0.0;  // hartree
};

/// Lowest Morse eigenfunctions on one axis, grid-normalized along that axis.
struct MolecularStates1D {
  Axis axis;
  std::vector<double> energies;  // hartree
  std::vector<Eigen::VectorXd> functions;
};

MolecularStates1D molecular_eigenstates_1d(const MorseParams& morse, const Axis& axis, int n_v,
                                           const RelaxationConfig& cfg = {});

/// Normalized harmonic level n of frequency omega_c and unit mass centred at
/// `center`. Throws BoundaryLeakError if the axis does not contain it.
Eigen::VectorXd photon_eigenfunction(int n, double omega_c, const Axis& axis, double center = 0.0);

struct BareBasisOptions {
  int n_v_max = 2;
  int n_photon_max = 2;
  double photon_center = 0.0;
  RelaxationConfig relax{};
};

/// Product states with matter quanta <= n_v_max, photon number <= n_photon_max and
/// total quanta <= max(n_v_max, n_photon_max), ordered by total quanta then energy.
std::vector<BareState> build_bare_basis(const ProductGrid& grid, const MorseParams& morse, double omega_c,
                                        const BareBasisOptions& opt = {});

struct DecompositionTable {
  std::vector<std::string> row_labels;
  std::vector<BareLabel> columns;
  Eigen::MatrixXd coefficients;  // c_ij = <bare_j | chi_i>, rows are coupled states
  Eigen::MatrixXd weights;       // |c_ij|^2
  std::vector<double> residual;  // 1 - sum_j |c_ij|^2
  std::vector<double> energies_cm;  // coupled-state energies above the ground state
  std::vector<std::string> notes;
};

DecompositionTable decompose(const EigenSolution& eig, const std::vector<BareState>& basis);

/// Comma-separated table: header row of bare labels, one row per coupled state
/// with its label, energy, weights (4 decimals) and residual.
void write_decomposition_csv(std::ostream& out, const DecompositionTable& t);

}  // namespace poldqc
