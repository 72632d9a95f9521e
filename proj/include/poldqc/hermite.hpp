#pragma once

#include <cmath>
#include <numbers>
#include <vector>

namespace poldqc {

/// Normalized Hermite functions psi_0..psi_nmax at xi, with
/// integral psi_n(xi)^2 dxi = 1. Three-term recurrence, stable for large n.
inline std::vector<double> hermite_functions(int nmax, double xi) {
  std::vector<double> h(static_cast<std::size_t>(nmax) + 1);
  h[0] = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * xi * xi);
  if (nmax >= 1) h[1] = std::sqrt(2.0) * xi * h[0];
  for (int n = 1; n < nmax; ++n) {
    h[static_cast<std::size_t>(n) + 1] = std::sqrt(2.0 / (n + 1)) * xi * h[static_cast<std::size_t>(n)] -
                                         std::sqrt(static_cast<double>(n) / (n + 1)) * h[static_cast<std::size_t>(n) - 1];
  }
  return h;
}

/// Harmonic-oscillator eigenfunction of level n for mass m and frequency w
/// centred at x0, normalized over the real line.
inline double oscillator_function(int n, double mass, double omega, double x0, double x) {
  const double s = std::sqrt(mass * omega);
  return std::sqrt(s) * hermite_functions(n, s * (x - x0))[static_cast<std::size_t>(n)];
}

}  // namespace poldqc
