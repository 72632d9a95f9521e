#include <cmath>
#include <numbers>

#include "doctest.h"
#include "poldqc/errors.hpp"
#include "poldqc/grid.hpp"
#include "poldqc/kinetic.hpp"

using namespace poldqc;

TEST_CASE("axis construction rejects bad input") {
  CHECK_THROWS_AS(make_axis("r1", 8, 0.0, 1.0, 1.0), ValidationError);
  CHECK_THROWS_AS(make_axis("r1", 16, 1.0, 1.0, 1.0), ValidationError);
  CHECK_THROWS_AS(make_axis("r1", 16, 0.0, 1.0, -2.0), ValidationError);
  const Axis a = make_axis("qc", 21, -10.0, 10.0, 1.0);
  CHECK(a.spacing() == doctest::Approx(1.0));
  CHECK(a.is_photon());
}

TEST_CASE("product grid layout puts the photon axis last") {
  const ProductGrid g({make_axis("r1", 16, 0.0, 15.0, 2.0), make_axis("qc", 17, -8.0, 8.0, 1.0)});
  CHECK(g.total_points() == 272);
  CHECK(g.stride(0) == 17);
  CHECK(g.stride(1) == 1);
  CHECK(g.has_photon_axis());
  CHECK(g.n_molecular_axes() == 1);
  CHECK(g.volume_element() == doctest::Approx(1.0 * 1.0));
  const auto idx = g.unravel(2 * 17 + 1);
  CHECK(idx[0] == 2);
  CHECK(idx[1] == 1);
  CHECK_THROWS(ProductGrid({make_axis("qc", 17, -8.0, 8.0, 1.0), make_axis("r1", 16, 0.0, 15.0, 2.0)}));
}

TEST_CASE("inner product includes the volume element") {
  const ProductGrid g({make_axis("r1", 16, 0.0, 7.5, 1.0)});
  Wavefunction a(g, Eigen::VectorXcd::Ones(16));
  CHECK(inner_product(a, a).real() == doctest::Approx(16 * 0.5));
  const Wavefunction n = normalize(a);
  CHECK(n.norm() == doctest::Approx(1.0));
}

TEST_CASE("kinetic operator is exact on a resolved plane wave") {
  const std::size_t n = 64;
  const double len = 10.0;
  // The grid is periodic with period n * dx.
  const Axis ax = make_axis("r1", n, 0.0, len * (n - 1) / n, 3.0);
  const ProductGrid g({ax});
  const double k = 2.0 * std::numbers::pi * 4.0 / len;
  Eigen::VectorXcd v(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) v[static_cast<Eigen::Index>(i)] = std::polar(1.0, k * ax.coordinate(i));
  const Wavefunction t = apply_kinetic(Wavefunction(g, v));
  const double expected = k * k / (2.0 * 3.0);
  CHECK((t.amplitudes() - expected * v).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("kinetic operator is symmetric on a 2D grid") {
  const ProductGrid g({make_axis("r1", 16, 0.5, 3.0, 1700.0), make_axis("qc", 18, -4.0, 4.0, 1.0)});
  const KineticOperator t(g);
  Eigen::VectorXd a(288);
  Eigen::VectorXd b(288);
  for (int i = 0; i < 288; ++i) {
    a[i] = std::sin(0.37 * i);
    b[i] = std::cos(0.11 * i * i);
  }
  CHECK(a.dot(t.apply(b)) == doctest::Approx(b.dot(t.apply(a))).epsilon(1e-12));
  CHECK(t.max_eigenvalue() > 0.0);
}

TEST_CASE("Gram-Schmidt deflation and boundary checks") {
  const ProductGrid g({make_axis("r1", 16, 0.0, 15.0, 1.0)});
  Eigen::VectorXcd u = Eigen::VectorXcd::Zero(16);
  u[0] = 1.0;
  Eigen::VectorXcd v = u;
  v[5] = 1.0;
  const Wavefunction e0(g, u);
  const Wavefunction psi(g, v);
  const std::vector<Wavefunction> basis{e0};
  const Wavefunction d = gram_schmidt_deflate(psi, basis);
  CHECK(std::abs(inner_product(e0, d)) < 1e-14);
  CHECK(d.norm() == doctest::Approx(1.0));
  CHECK_THROWS_AS(gram_schmidt_deflate(e0, basis), DegenerateInputError);
  CHECK_THROWS_AS(check_boundary_leak(normalize(e0)), BoundaryLeakError);
}
