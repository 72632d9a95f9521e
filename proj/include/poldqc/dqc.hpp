#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "poldqc/relax.hpp"

namespace poldqc {

/// Uniform frequency axis in cm^-1.
struct FrequencyAxis {
  double start = 0.0;
  double step = 1.0;
  int n = 2;

  double at(int i) const { return start + step * i; }
  double last() const { return at(n - 1); }
  bool operator==(const FrequencyAxis&) const = default;
};

void validate(const FrequencyAxis& a);

/// Axis from [lo, hi] with n points.
FrequencyAxis make_frequency_axis(double lo, double hi, int n);

struct SpectrumGrid {
  FrequencyAxis omega2;
  FrequencyAxis omega3;
  Eigen::MatrixXcd values;  // rows: omega2, columns: omega3
  double gamma_cm = 10.0;
  std::optional<double> normalization;  // divisor applied by normalize_spectrum

  double max_abs() const { return values.size() == 0 ? 0.0 : values.cwiseAbs().maxCoeff(); }
};

struct Peak {
  double omega2 = 0.0;
  double omega3 = 0.0;
  double magnitude = 0.0;  // |S| / max|S|
  std::string assignment;
};

/// S(W3, W2) = sum_{e, e', f} mu_ge' mu_e'f mu_fe mu_eg / (W2 - W_fg + i g)
///             * [1 / (W3 - W_e'g + i g) - 1 / (W3 - W_fe' + i g)]
/// with all transition frequencies in cm^-1.
SpectrumGrid compute_dqc(const EigenSolution& eig, double gamma_cm, const FrequencyAxis& omega2,
                         const FrequencyAxis& omega3);

/// Same sum restricted to final states in `f_subset` (indices into the eigen solution).
SpectrumGrid compute_dqc_partial(const EigenSolution& eig, double gamma_cm, const FrequencyAxis& omega2,
                                 const FrequencyAxis& omega3, std::span<const int> f_subset);

SpectrumGrid normalize_spectrum(const SpectrumGrid& s);

/// |a| / max|a| - |b| / max|b|. Throws ShapeError when the axes differ.
Eigen::MatrixXd difference_spectrum(const SpectrumGrid& a, const SpectrumGrid& b);

/// Strict 8-neighbour maxima of |S| above threshold * max|S|, refined by a
/// three-point parabola along each axis, sorted by magnitude. When `eig` is
/// given each peak is assigned to the nearest pathway resonance.
std::vector<Peak> find_peaks(const SpectrumGrid& s, double threshold, const EigenSolution* eig = nullptr);

struct SpectrumChannels {
  Eigen::MatrixXd re;
  Eigen::MatrixXd im;
  Eigen::MatrixXd abs;
};

/// Real, imaginary and absolute parts divided by max|S|.
SpectrumChannels spectrum_channels(const SpectrumGrid& s);

}  // namespace poldqc
