#include <complex>
#include <sstream>

#include "doctest.h"
#include "poldqc/dqc.hpp"
#include "poldqc/errors.hpp"
#include "poldqc/spectrum_io.hpp"
#include "poldqc/units.hpp"

using namespace poldqc;

namespace {

EigenSolution three_level(double w1, double w2) {
  EigenSolution eig;
  eig.energies = {0.0, units::cm_to_hartree(w1), units::cm_to_hartree(w1 + w2)};
  eig.dipoles = Eigen::MatrixXd::Zero(3, 3);
  eig.dipoles(0, 1) = eig.dipoles(1, 0) = 0.1;
  eig.dipoles(1, 2) = eig.dipoles(2, 1) = 0.14;
  eig.partition.g = 0;
  eig.partition.e_set = {1};
  eig.partition.f_set = {2};
  return eig;
}

}  // namespace

TEST_CASE("three-level DQC has the closed form") {
  const EigenSolution eig = three_level(4281.0, 4108.0);
  const FrequencyAxis w2{8300.0, 2.0, 60};
  const FrequencyAxis w3{4000.0, 2.0, 200};
  const SpectrumGrid s = compute_dqc(eig, 10.0, w2, w3);
  REQUIRE(s.values.rows() == 60);
  REQUIRE(s.values.cols() == 200);
  const std::complex<double> ig(0.0, 10.0);
  const double wfg = (eig.energies[2]) * units::hartree_to_cm;
  const double weg = eig.energies[1] * units::hartree_to_cm;
  for (int i = 0; i < 60; i += 7) {
    for (int j = 0; j < 200; j += 13) {
      const auto ref = 0.1 * 0.1 * 0.14 * 0.14 / (w2.at(i) - wfg + ig) *
                       (1.0 / (w3.at(j) - weg + ig) - 1.0 / (w3.at(j) - (wfg - weg) + ig));
      CHECK(std::abs(s.values(i, j) - ref) <= 1e-12 * std::abs(ref));
    }
  }
}

TEST_CASE("harmonic ladder cancels") {
  EigenSolution eig = three_level(4000.0, 4000.0);
  eig.dipoles(1, 2) = eig.dipoles(2, 1) = 0.1 * std::sqrt(2.0);
  const SpectrumGrid s = compute_dqc(eig, 10.0, FrequencyAxis{7900.0, 1.0, 200}, FrequencyAxis{3900.0, 1.0, 200});
  CHECK(s.max_abs() < 1e-15);
}

TEST_CASE("spectrum post-processing") {
  const EigenSolution eig = three_level(4281.0, 4108.0);
  const SpectrumGrid s = compute_dqc(eig, 10.0, FrequencyAxis{8300.0, 1.0, 181}, FrequencyAxis{4000.0, 1.0, 451});
  const SpectrumGrid n = normalize_spectrum(s);
  CHECK(n.max_abs() == doctest::Approx(1.0));
  REQUIRE(n.normalization.has_value());
  CHECK(*n.normalization == doctest::Approx(s.max_abs()));
  CHECK(difference_spectrum(s, s).cwiseAbs().maxCoeff() == 0.0);
  const auto ch = spectrum_channels(s);
  CHECK(ch.abs.maxCoeff() == doctest::Approx(1.0));

  const auto peaks = find_peaks(s, 0.1, &eig);
  REQUIRE(peaks.size() == 2);
  CHECK(peaks[0].omega2 == doctest::Approx(8389.0).epsilon(1e-4));
  CHECK(std::abs(peaks[0].omega3 - peaks[1].omega3) == doctest::Approx(173.0).epsilon(0.02));
  CHECK(peaks[0].assignment.rfind("f2:e1:", 0) == 0);
  CHECK_THROWS_AS(find_peaks(s, 1.5), ValidationError);

  SpectrumGrid other = s;
  other.omega3.n = 450;
  CHECK_THROWS_AS(difference_spectrum(s, other), ShapeError);
  SpectrumGrid zero = s;
  zero.values.setZero();
  CHECK_THROWS_AS(normalize_spectrum(zero), DegenerateInputError);
}

TEST_CASE("partial spectra select final states") {
  const EigenSolution eig = three_level(4281.0, 4108.0);
  const FrequencyAxis a{8300.0, 5.0, 40};
  const FrequencyAxis b{4000.0, 5.0, 90};
  const std::vector<int> f{2};
  CHECK(compute_dqc_partial(eig, 10.0, a, b, f).values == compute_dqc(eig, 10.0, a, b).values);
  const std::vector<int> bad{1};
  CHECK_THROWS_AS(compute_dqc_partial(eig, 10.0, a, b, bad), PartitionError);
}

TEST_CASE("input validation") {
  EigenSolution eig = three_level(4281.0, 4108.0);
  const FrequencyAxis a{8300.0, 5.0, 40};
  CHECK_THROWS_AS(compute_dqc(eig, 0.0, a, a), ValidationError);
  CHECK_THROWS_AS(compute_dqc(eig, 10.0, FrequencyAxis{0.0, -1.0, 10}, a), ValidationError);
  eig.partition.f_set.clear();
  CHECK_THROWS_AS(compute_dqc(eig, 10.0, a, a), PartitionError);
  CHECK_THROWS_AS(make_frequency_axis(2.0, 1.0, 10), ValidationError);
}

TEST_CASE("spectrum and map files round trip bitwise") {
  const EigenSolution eig = three_level(4281.0, 4108.0);
  const SpectrumGrid s = normalize_spectrum(compute_dqc(eig, 10.0, FrequencyAxis{8300.0, 0.7, 30}, FrequencyAxis{4000.0, 1.3, 40}));
  std::stringstream a;
  write_spectrum(a, s);
  const SpectrumGrid back = read_spectrum(a);
  CHECK(back.values == s.values);
  CHECK(back.omega2 == s.omega2);
  CHECK(back.normalization == s.normalization);
  std::stringstream b;
  write_spectrum(b, back);
  CHECK(b.str() == a.str());

  RealMap m{s.omega2, s.omega3, "abs", s.values.cwiseAbs()};
  std::stringstream c;
  write_map(c, m);
  const RealMap mb = read_map(c);
  CHECK(mb.values == m.values);
  CHECK(mb.quantity == "abs");

  std::stringstream broken("#POLDQC-SPECTRUM v1\n#omega2_cm 1 1 2\n");
  CHECK_THROWS_AS(read_spectrum(broken), ParseError);
}
