#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace poldqc {

using complex = std::complex<double>;

/// One uniformly spaced coordinate. Labels are r1, r2 (bond lengths, bohr) or
/// qc (photon displacement coordinate, unit mass).
struct Axis {
  std::string label;
  std::size_t n_points = 0;
  double min = 0.0;
  double max = 0.0;
  double mass = 1.0;

  double spacing() const { return (max - min) / static_cast<double>(n_points - 1); }
  double coordinate(std::size_t i) const { return min + static_cast<double>(i) * spacing(); }
  bool is_photon() const { return label == "qc"; }

  bool operator==(const Axis&) const = default;
};

/// Validates and returns an axis. Throws ValidationError on bad input.
Axis make_axis(std::string label, std::size_t n_points, double min, double max, double mass);

/// Row-major product grid of 1-3 axes, last axis fastest. If a photon axis is
/// present it is the last one.
class ProductGrid {
 public:
  ProductGrid() = default;
  explicit ProductGrid(std::vector<Axis> axes);

  std::size_t rank() const { return axes_.size(); }
  const Axis& axis(std::size_t i) const { return axes_.at(i); }
  const std::vector<Axis>& axes() const { return axes_; }
  std::size_t total_points() const { return total_; }
  std::size_t stride(std::size_t axis) const { return strides_.at(axis); }
  double volume_element() const { return volume_; }
  bool has_photon_axis() const { return !axes_.empty() && axes_.back().is_photon(); }
  /// Number of leading r axes.
  std::size_t n_molecular_axes() const { return has_photon_axis() ? rank() - 1 : rank(); }

  /// Multi-index of a flat position.
  std::vector<std::size_t> unravel(std::size_t flat) const;
  /// Tabulates f(coordinates) over the grid in storage order.
  template <class F>
  Eigen::VectorXd tabulate(F&& f) const {
    Eigen::VectorXd out(static_cast<Eigen::Index>(total_));
    std::vector<double> x(rank());
    for (std::size_t k = 0; k < total_; ++k) {
      std::size_t rem = k;
      for (std::size_t a = 0; a < rank(); ++a) {
        const std::size_t i = rem / strides_[a];
        rem %= strides_[a];
        x[a] = axes_[a].coordinate(i);
      }
      out[static_cast<Eigen::Index>(k)] = f(std::span<const double>(x));
    }
    return out;
  }

  bool operator==(const ProductGrid& other) const { return axes_ == other.axes_; }

 private:
  std::vector<Axis> axes_;
  std::vector<std::size_t> strides_;
  std::size_t total_ = 0;
  double volume_ = 0.0;
};

/// Complex amplitudes on a product grid. Norm includes the volume element.
class Wavefunction {
 public:
  Wavefunction() = default;
  explicit Wavefunction(ProductGrid grid);
  Wavefunction(ProductGrid grid, Eigen::VectorXcd amplitudes);

  const ProductGrid& grid() const { return grid_; }
  const Eigen::VectorXcd& amplitudes() const { return amps_; }
  Eigen::VectorXcd& amplitudes() { return amps_; }

  double norm() const;
  bool is_finite() const;

 private:
  ProductGrid grid_;
  Eigen::VectorXcd amps_;
};

/// <a|b> with the grid volume element; conjugate-linear in a.
complex inner_product(const Wavefunction& a, const Wavefunction& b);

Wavefunction normalize(const Wavefunction& psi);

/// Pointwise product with a real surface tabulated on the same grid.
Wavefunction apply_diagonal(const Wavefunction& psi, std::span<const double> surface);
Wavefunction apply_diagonal(const Wavefunction& psi, const Eigen::VectorXd& surface);

/// Sum over axes of -1/(2m) d^2/dx^2, evaluated spectrally on the periodic grid.
Wavefunction apply_kinetic(const Wavefunction& psi);

/// Projects out `basis` (assumed orthonormal) and renormalizes.
/// Throws DegenerateInputError when the trial lies in the span of the basis.
Wavefunction gram_schmidt_deflate(const Wavefunction& psi, std::span<const Wavefunction> basis);

/// Largest |psi_k| * sqrt(dV) over grid points on any face of the box, for a
/// normalized state.
double boundary_amplitude(const Wavefunction& psi);
double boundary_amplitude(const ProductGrid& grid, const Eigen::VectorXd& normalized_amplitudes);

/// Throws BoundaryLeakError when boundary_amplitude exceeds `limit`.
void check_boundary_leak(const Wavefunction& psi, double limit = 1e-6, const std::string& context = {});

}  // namespace poldqc
