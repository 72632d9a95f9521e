#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "poldqc/grid.hpp"
#include "poldqc/kinetic.hpp"
#include "poldqc/krylov.hpp"
#include "poldqc/model.hpp"

namespace poldqc {

struct RelaxationConfig {
  int n_states = 10;
  double dt_imag = 1.0e4;   // atomic units
  int krylov_order = 30;
  double energy_tol = 1e-10;  // hartree
  int max_steps = 20000;
  int convergence_window = 50;
  /// Relax exchange-symmetric and antisymmetric sectors separately when the
  /// surface is symmetric under r1 <-> r2.
  bool use_exchange_symmetry = true;
  /// Optional progress sink, called once per converged state.
  std::function<void(const std::string&)> progress;
};

void validate(const RelaxationConfig& cfg);

struct ManifoldPartition {
  int g = 0;
  std::vector<int> e_set;
  std::vector<int> f_set;
  double omega_ref = 0.0;  // hartree
  std::pair<double, double> e_window{0.5, 1.5};
  std::pair<double, double> f_window{1.5, 2.5};
  std::vector<int> unclassified;
};

/// Classifies states by (E - E0) / omega_ref. Throws PartitionError if either
/// manifold is empty or omega_ref is not positive.
ManifoldPartition partition_manifolds(std::span<const double> energies, double omega_ref);

/// Human-readable notes for states outside both windows.
std::vector<std::string> partition_warnings(const ManifoldPartition& p, std::span<const double> energies);

/// H = T + V on a product grid.
class Hamiltonian {
 public:
  Hamiltonian(const ProductGrid& grid, Eigen::VectorXd potential);

  const ProductGrid& grid() const { return kinetic_->grid(); }
  const Eigen::VectorXd& potential() const { return potential_; }

  Eigen::VectorXd apply(const Eigen::VectorXd& psi) const;
  Eigen::VectorXcd apply(const Eigen::VectorXcd& psi) const;
  double expectation(const Eigen::VectorXd& psi) const;

 private:
  std::shared_ptr<KineticOperator> kinetic_;
  Eigen::VectorXd potential_;
};

/// Lowest eigenpairs of a real Hamiltonian. States are Euclidean-normalized
/// real vectors; multiply by 1/sqrt(dV) for grid normalization.
struct RelaxedStates {
  std::vector<double> energies;
  std::vector<Eigen::VectorXd> states;
  std::vector<int> steps;
  bool exchange_symmetric = false;
  std::vector<int> exchange_parity;  // +1, -1, or 0 when not resolved
};

RelaxedStates relax_lowest(const Hamiltonian& h, const RelaxationConfig& cfg);

struct EigenSolution {
  ProductGrid grid;
  std::vector<double> energies;
  std::vector<Wavefunction> states;  // may be empty when loaded without a sidecar
  Eigen::MatrixXd dipoles;
  ManifoldPartition partition;
  Metadata metadata;
  std::vector<std::string> warnings;
};

EigenSolution relax_eigenstates(const SurfaceSet& s, const RelaxationConfig& cfg);

/// mu_ij = <chi_i| mu |chi_j>. Throws ShapeError on grid mismatch and
/// Numerical Error when an element has an imaginary part above 1e-10.
Eigen::MatrixXd transition_dipoles(std::span<const Wavefunction> states, const Eigen::VectorXd& dipole);

/// Reference frequency for partitioning: cavity frequency from metadata, or
/// E1 - E0 for field-free sets or when no cavity frequency is recorded.
double reference_frequency(const SurfaceSet& s, std::span<const double> energies);

/// Reorders states whose energies agree within `tol` by descending |mu_0k|.
/// Returns the permutation applied.
std::vector<int> order_degenerate_states(EigenSolution& sol, double tol = 1e-9);

}  // namespace poldqc
