#include "poldqc/dqc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "poldqc/errors.hpp"
#include "poldqc/units.hpp"

namespace poldqc {

void validate(const FrequencyAxis& a) {
  if (!(a.step > 0.0)) throw ValidationError("frequency step must be positive");
  if (a.n < 2) throw ValidationError("frequency axis needs at least 2 points");
  if (!std::isfinite(a.start)) throw ValidationError("frequency start must be finite");
}

FrequencyAxis make_frequency_axis(double lo, double hi, int n) {
  if (n < 2 || !(hi > lo)) throw ValidationError("frequency axis needs hi > lo and n >= 2");
  FrequencyAxis a{lo, (hi - lo) / (n - 1), n};
  validate(a);
  return a;
}

namespace {

void check_inputs(const EigenSolution& eig, double gamma_cm, const FrequencyAxis& w2, const FrequencyAxis& w3) {
  validate(w2);
  validate(w3);
  if (!(gamma_cm > 0.0)) throw ValidationError("dephasing gamma must be positive");
  if (eig.partition.e_set.empty() || eig.partition.f_set.empty()) {
    throw PartitionError("spectrum needs non-empty e and f manifolds");
  }
  const auto n = static_cast<Eigen::Index>(eig.energies.size());
  if (eig.dipoles.rows() != n || eig.dipoles.cols() != n) throw ShapeError("dipole matrix does not match energies");
}

SpectrumGrid evaluate(const EigenSolution& eig, double gamma_cm, const FrequencyAxis& w2, const FrequencyAxis& w3,
                      const std::vector<int>& f_set) {
  check_inputs(eig, gamma_cm, w2, w3);
  const int g = eig.partition.g;
  const auto& e_set = eig.partition.e_set;
  const auto freq = [&](int a, int b) {
    return (eig.energies[static_cast<std::size_t>(a)] - eig.energies[static_cast<std::size_t>(b)]) *
           units::hartree_to_cm;
  };
  const auto& mu = eig.dipoles;
  const complex ig(0.0, gamma_cm);

  SpectrumGrid s;
  s.omega2 = w2;
  s.omega3 = w3;
  s.gamma_cm = gamma_cm;
  s.values = Eigen::MatrixXcd::Zero(w2.n, w3.n);

  Eigen::VectorXcd row(w3.n);
  Eigen::VectorXcd col(w2.n);
  for (int e : e_set) {
    for (int ep : e_set) {
      for (int f : f_set) {
        const double amp = mu(g, ep) * mu(ep, f) * mu(f, e) * mu(e, g);
        if (amp == 0.0) continue;
        const double w_fg = freq(f, g);
        const double w_epg = freq(ep, g);
        const double w_fep = freq(f, ep);
        for (int j = 0; j < w3.n; ++j) {
          const double x = w3.at(j);
          row[j] = amp * (1.0 / (x - w_epg + ig) - 1.0 / (x - w_fep + ig));
        }
        for (int i = 0; i < w2.n; ++i) col[i] = 1.0 / (w2.at(i) - w_fg + ig);
        s.values.noalias() += col * row.transpose();
      }
    }
  }
  return s;
}

}  // namespace

SpectrumGrid compute_dqc(const EigenSolution& eig, double gamma_cm, const FrequencyAxis& omega2,
                         const FrequencyAxis& omega3) {
  return evaluate(eig, gamma_cm, omega2, omega3, eig.partition.f_set);
}

SpectrumGrid compute_dqc_partial(const EigenSolution& eig, double gamma_cm, const FrequencyAxis& omega2,
                                 const FrequencyAxis& omega3, std::span<const int> f_subset) {
  std::vector<int> f;
  for (int x : f_subset) {
    if (std::find(eig.partition.f_set.begin(), eig.partition.f_set.end(), x) == eig.partition.f_set.end()) {
      throw PartitionError("state " + std::to_string(x) + " is not in the f manifold");
    }
    f.push_back(x);
  }
  if (f.empty()) throw PartitionError("empty final-state subset");
  return evaluate(eig, gamma_cm, omega2, omega3, f);
}

SpectrumGrid normalize_spectrum(const SpectrumGrid& s) {
  const double m = s.max_abs();
  if (!(m > 0.0)) throw DegenerateInputError("cannot normalize an all-zero spectrum");
  SpectrumGrid out = s;
  out.values /= m;
  out.normalization = s.normalization.value_or(1.0) * m;
  return out;
}

Eigen::MatrixXd difference_spectrum(const SpectrumGrid& a, const SpectrumGrid& b) {
  if (!(a.omega2 == b.omega2) || !(a.omega3 == b.omega3) || a.values.rows() != b.values.rows() ||
      a.values.cols() != b.values.cols()) {
    throw ShapeError("difference spectrum needs identical frequency axes");
  }
  const double ma = a.max_abs();
  const double mb = b.max_abs();
  if (!(ma > 0.0) || !(mb > 0.0)) throw DegenerateInputError("cannot normalize an all-zero spectrum");
  return a.values.cwiseAbs() / ma - b.values.cwiseAbs() / mb;
}

namespace {

double parabola_offset(double fm, double f0, double fp) {
  const double den = fm - 2.0 * f0 + fp;
  if (den >= 0.0) return 0.0;
  return std::clamp(0.5 * (fm - fp) / den, -0.5, 0.5);
}

std::string assign(const EigenSolution& eig, double w2, double w3) {
  const int g = eig.partition.g;
  const auto freq = [&](int a, int b) {
    return (eig.energies[static_cast<std::size_t>(a)] - eig.energies[static_cast<std::size_t>(b)]) *
           units::hartree_to_cm;
  };
  const auto& mu = eig.dipoles;
  const auto amplitude = [&](int ep, int f) {
    double back = 0.0;
    for (int e : eig.partition.e_set) back += mu(f, e) * mu(e, g);
    return std::abs(mu(g, ep) * mu(ep, f) * back);
  };
  double largest = 0.0;
  for (int f : eig.partition.f_set) {
    for (int ep : eig.partition.e_set) largest = std::max(largest, amplitude(ep, f));
  }
  double best = std::numeric_limits<double>::infinity();
  std::string label;
  for (int f : eig.partition.f_set) {
    for (int ep : eig.partition.e_set) {
      if (amplitude(ep, f) <= 1e-8 * largest) continue;
      const double d2 = w2 - freq(f, g);
      for (int kind = 0; kind < 2; ++kind) {
        const double d3 = w3 - (kind == 0 ? freq(ep, g) : freq(f, ep));
        const double d = std::hypot(d2, d3);
        if (d < best) {
          best = d;
          label = "f" + std::to_string(f) + ":e" + std::to_string(ep) + (kind == 0 ? ":eg" : ":fe");
        }
      }
    }
  }
  return label;
}

}  // namespace

std::vector<Peak> find_peaks(const SpectrumGrid& s, double threshold, const EigenSolution* eig) {
  if (!(threshold > 0.0 && threshold < 1.0)) throw ValidationError("peak threshold must lie in (0, 1)");
  const Eigen::MatrixXd a = s.values.cwiseAbs();
  const double m = a.size() ? a.maxCoeff() : 0.0;
  std::vector<Peak> out;
  if (!(m > 0.0)) return out;
  for (Eigen::Index i = 1; i + 1 < a.rows(); ++i) {
    for (Eigen::Index j = 1; j + 1 < a.cols(); ++j) {
      const double v = a(i, j);
      if (v < threshold * m) continue;
      bool is_max = true;
      for (int di = -1; di <= 1 && is_max; ++di) {
        for (int dj = -1; dj <= 1; ++dj) {
          if ((di || dj) && !(v > a(i + di, j + dj))) {
            is_max = false;
            break;
          }
        }
      }
      if (!is_max) continue;
      Peak p;
      p.omega2 = s.omega2.at(static_cast<int>(i)) + s.omega2.step * parabola_offset(a(i - 1, j), v, a(i + 1, j));
      p.omega3 = s.omega3.at(static_cast<int>(j)) + s.omega3.step * parabola_offset(a(i, j - 1), v, a(i, j + 1));
      p.magnitude = v / m;
      if (eig != nullptr) p.assignment = assign(*eig, p.omega2, p.omega3);
      out.push_back(std::move(p));
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const Peak& x, const Peak& y) { return x.magnitude > y.magnitude; });
  return out;
}

SpectrumChannels spectrum_channels(const SpectrumGrid& s) {
  const double m = s.max_abs();
  if (!(m > 0.0)) throw DegenerateInputError("cannot normalize an all-zero spectrum");
  return {s.values.real() / m, s.values.imag() / m, s.values.cwiseAbs() / m};
}

}  // namespace poldqc
