#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "poldqc/grid.hpp"

namespace poldqc {

template <class Vec>
using LinearOperator = std::function<Vec(const Vec&)>;

template <class Vec>
struct KrylovStep {
  Vec state;              // Euclidean-normalized, phase fixed
  double energy = 0.0;    // Rayleigh quotient of `state`
  double start_energy = 0.0;
  int dimension = 0;      // Krylov dimension actually built
  bool breakdown = false; // invariant subspace reached
};

namespace detail {

inline double real_part(double x) { return x; }
inline double real_part(const std::complex<double>& x) { return x.real(); }

/// Largest-magnitude amplitude made real and positive.
template <class Vec>
void fix_phase(Vec& v) {
  Eigen::Index imax = 0;
  v.cwiseAbs().maxCoeff(&imax);
  const auto a = v[imax];
  if (std::abs(a) == 0.0) return;
  v *= std::abs(a) / a;
}

}  // namespace detail

/// One imaginary-time step exp(-H tau) psi evaluated in the order-k Krylov
/// (Lanczos) subspace of H, with full reorthogonalization of the basis.
///
/// The subspace exponential is built from the eigendecomposition of the
/// tridiagonal projection, shifted by its lowest eigenvalue, so any tau > 0 is
/// stable. For tau much larger than the inverse Ritz gap the step reduces to
/// selecting the lowest Ritz vector. Inner products are Euclidean; the grid
/// volume element is a constant factor and does not change the result.
template <class Vec>
KrylovStep<Vec> krylov_imaginary_step(const Vec& psi, const LinearOperator<Vec>& h, double tau, int order) {
  using Scalar = typename Vec::Scalar;
  KrylovStep<Vec> out;
  const double n0 = psi.norm();
  std::vector<Vec> basis;
  basis.reserve(static_cast<std::size_t>(order));
  basis.push_back(psi / n0);
  std::vector<double> alpha;
  std::vector<double> beta;

  for (int j = 0; j < order; ++j) {
    Vec w = h(basis[static_cast<std::size_t>(j)]);
    const double hnorm = w.norm();
    const double a = detail::real_part(basis[static_cast<std::size_t>(j)].dot(w));
    alpha.push_back(a);
    if (j == 0) out.start_energy = a;
    if (j + 1 == order) break;
    // Classical Gram-Schmidt against the whole basis, twice.
    for (int pass = 0; pass < 2; ++pass) {
      for (const Vec& v : basis) {
        const Scalar c = v.dot(w);
        w -= c * v;
      }
    }
    const double b = w.norm();
    if (b < 1e-14 * std::max(1.0, hnorm)) {
      out.breakdown = true;
      break;
    }
    beta.push_back(b);
    basis.push_back(w / b);
  }

  const int m = static_cast<int>(alpha.size());
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    t(i, i) = alpha[static_cast<std::size_t>(i)];
    if (i + 1 < m) t(i, i + 1) = t(i + 1, i) = beta[static_cast<std::size_t>(i)];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
  const Eigen::VectorXd& theta = es.eigenvalues();
  const Eigen::MatrixXd& y = es.eigenvectors();
  Eigen::VectorXd weights(m);
  for (int i = 0; i < m; ++i) weights[i] = std::exp(-tau * (theta[i] - theta[0])) * y(0, i);
  Eigen::VectorXd c = y * weights;
  c /= c.norm();

  Vec result = Vec::Zero(psi.size());
  for (int i = 0; i < m; ++i) result += c[i] * basis[static_cast<std::size_t>(i)];
  result /= result.norm();
  detail::fix_phase(result);

  out.state = std::move(result);
  out.energy = c.dot(t * c);
  out.dimension = m;
  return out;
}

/// Wavefunction-level step with the same semantics; the result is normalized
/// with the grid volume element.
Wavefunction krylov_imaginary_step(const Wavefunction& psi, const LinearOperator<Eigen::VectorXcd>& h, double tau,
                                   int order);

}  // namespace poldqc
