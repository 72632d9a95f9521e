#pragma once

#include <memory>

#include <Eigen/Dense>

#include "poldqc/grid.hpp"

namespace poldqc {

/// Spectral kinetic energy operator on a periodic product grid.
///
/// Holds FFTW plans for the complex (c2c) and real (r2c/c2r) transforms. Plans are
/// created with FFTW_ESTIMATE so results do not depend on run-time planner timing,
/// and with FFTW_UNALIGNED so apply() can run on caller-owned arrays. apply() is
/// const and safe to call concurrently.
class KineticOperator {
 public:
  explicit KineticOperator(const ProductGrid& grid);
  ~KineticOperator();
  KineticOperator(const KineticOperator&) = delete;
  KineticOperator& operator=(const KineticOperator&) = delete;
  KineticOperator(KineticOperator&&) noexcept;
  KineticOperator& operator=(KineticOperator&&) noexcept;

  const ProductGrid& grid() const;

  Eigen::VectorXcd apply(const Eigen::VectorXcd& psi) const;
  Eigen::VectorXd apply(const Eigen::VectorXd& psi) const;

  /// Largest eigenvalue of the discrete operator.
  double max_eigenvalue() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Caps FFTW's internal thread count. Reads POLDQC_THREADS when n == 0.
void set_fft_threads(int n = 0);

}  // namespace poldqc
