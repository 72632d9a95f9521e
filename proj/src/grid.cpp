#include "poldqc/grid.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "poldqc/errors.hpp"
#include "poldqc/kinetic.hpp"

namespace poldqc {

Axis make_axis(std::string label, std::size_t n_points, double min, double max, double mass) {
  if (label != "r1" && label != "r2" && label != "qc") {
    throw ValidationError("axis label must be r1, r2 or qc, got '" + label + "'");
  }
  if (n_points < 16) throw ValidationError("axis " + label + " needs at least 16 points");
  if (!(max > min)) throw ValidationError("axis " + label + " requires max > min");
  if (!(mass > 0.0) || !std::isfinite(mass)) throw ValidationError("axis " + label + " requires mass > 0");
  return Axis{std::move(label), n_points, min, max, mass};
}

ProductGrid::ProductGrid(std::vector<Axis> axes) : axes_(std::move(axes)) {
  if (axes_.empty() || axes_.size() > 3) throw ValidationError("product grid needs 1 to 3 axes");
  std::set<std::string> seen;
  for (std::size_t a = 0; a < axes_.size(); ++a) {
    const Axis& ax = axes_[a];
    make_axis(ax.label, ax.n_points, ax.min, ax.max, ax.mass);
    if (!seen.insert(ax.label).second) throw ValidationError("duplicate axis label " + ax.label);
    if (ax.is_photon() && a + 1 != axes_.size()) throw ValidationError("qc axis must be the last axis");
  }
  strides_.assign(axes_.size(), 1);
  for (std::size_t a = axes_.size() - 1; a > 0; --a) strides_[a - 1] = strides_[a] * axes_[a].n_points;
  total_ = strides_.front() * axes_.front().n_points;
  volume_ = 1.0;
  for (const auto& ax : axes_) volume_ *= ax.spacing();
}

std::vector<std::size_t> ProductGrid::unravel(std::size_t flat) const {
  std::vector<std::size_t> idx(rank());
  for (std::size_t a = 0; a < rank(); ++a) {
    idx[a] = flat / strides_[a];
    flat %= strides_[a];
  }
  return idx;
}

Wavefunction::Wavefunction(ProductGrid grid)
    : grid_(std::move(grid)), amps_(Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(grid_.total_points()))) {}

Wavefunction::Wavefunction(ProductGrid grid, Eigen::VectorXcd amplitudes)
    : grid_(std::move(grid)), amps_(std::move(amplitudes)) {
  if (static_cast<std::size_t>(amps_.size()) != grid_.total_points()) {
    throw ShapeError("amplitude count " + std::to_string(amps_.size()) + " does not match grid size " +
                     std::to_string(grid_.total_points()));
  }
}

double Wavefunction::norm() const { return std::sqrt(amps_.squaredNorm() * grid_.volume_element()); }

bool Wavefunction::is_finite() const { return amps_.allFinite(); }

namespace {

void require_same_grid(const Wavefunction& a, const Wavefunction& b) {
  if (!(a.grid() == b.grid())) throw ShapeError("wavefunctions live on different grids");
}

}  // namespace

complex inner_product(const Wavefunction& a, const Wavefunction& b) {
  require_same_grid(a, b);
  return a.amplitudes().dot(b.amplitudes()) * a.grid().volume_element();
}

Wavefunction normalize(const Wavefunction& psi) {
  const double n = psi.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw DegenerateInputError("cannot normalize a zero or non-finite state");
  return Wavefunction(psi.grid(), psi.amplitudes() / n);
}

Wavefunction apply_diagonal(const Wavefunction& psi, std::span<const double> surface) {
  if (surface.size() != psi.grid().total_points()) {
    throw ShapeError("surface has " + std::to_string(surface.size()) + " values, grid has " +
                     std::to_string(psi.grid().total_points()));
  }
  Eigen::Map<const Eigen::VectorXd> v(surface.data(), static_cast<Eigen::Index>(surface.size()));
  return Wavefunction(psi.grid(), psi.amplitudes().cwiseProduct(v.cast<complex>()));
}

Wavefunction apply_diagonal(const Wavefunction& psi, const Eigen::VectorXd& surface) {
  return apply_diagonal(psi, std::span<const double>(surface.data(), static_cast<std::size_t>(surface.size())));
}

Wavefunction apply_kinetic(const Wavefunction& psi) {
  KineticOperator t(psi.grid());
  return Wavefunction(psi.grid(), t.apply(psi.amplitudes()));
}

Wavefunction gram_schmidt_deflate(const Wavefunction& psi, std::span<const Wavefunction> basis) {
  Eigen::VectorXcd out = psi.amplitudes();
  const double dv = psi.grid().volume_element();
  // Two passes keep the result orthogonal to ~1e-15 even for nearly parallel input.
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& b : basis) {
      require_same_grid(psi, b);
      const complex c = b.amplitudes().dot(out) * dv;
      out -= c * b.amplitudes();
    }
  }
  const double before = psi.norm();
  const double after = std::sqrt(out.squaredNorm() * dv);
  if (!(after >= 1e-12 * std::max(before, 1e-300)) || after < 1e-12) {
    throw DegenerateInputError("trial state lies in the span of the deflation basis");
  }
  return Wavefunction(psi.grid(), out / after);
}

double boundary_amplitude(const ProductGrid& grid, const Eigen::VectorXd& amps) {
  const double scale = std::sqrt(grid.volume_element());
  double worst = 0.0;
  for (std::size_t k = 0; k < grid.total_points(); ++k) {
    std::size_t rem = k;
    bool edge = false;
    for (std::size_t a = 0; a < grid.rank() && !edge; ++a) {
      const std::size_t i = rem / grid.stride(a);
      rem %= grid.stride(a);
      edge = (i == 0 || i + 1 == grid.axis(a).n_points);
    }
    if (edge) worst = std::max(worst, std::abs(amps[static_cast<Eigen::Index>(k)]) * scale);
  }
  return worst;
}

double boundary_amplitude(const Wavefunction& psi) {
  const Wavefunction n = normalize(psi);
  return boundary_amplitude(n.grid(), n.amplitudes().cwiseAbs().eval());
}

void check_boundary_leak(const Wavefunction& psi, double limit, const std::string& context) {
  const double amp = boundary_amplitude(psi);
  if (amp > limit) {
    throw BoundaryLeakError((context.empty() ? std::string("state") : context) + " has edge amplitude " +
                                std::to_string(amp) + " > " + std::to_string(limit),
                            amp);
  }
}

}  // namespace poldqc
