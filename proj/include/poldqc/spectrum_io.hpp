#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "poldqc/dqc.hpp"

namespace poldqc {

// Spectrum file (text):
//
//   #POLDQC-SPECTRUM v1
//   #omega2_cm <start> <step> <n>
//   #omega3_cm <start> <step> <n>
//   #gamma_cm <gamma>
//   #normalization <divisor>          (only for normalized spectra)
//   #columns omega2 omega3 re im abs
//   <omega2> <omega3> <re> <im> <abs> (omega2-major, omega3 fastest)
//
// Real-valued matrices (channels, difference spectra) use the same layout with
// magic "#POLDQC-MAP v1", a "#quantity <name>" line and "#columns omega2 omega3 value".

void write_spectrum(std::ostream& out, const SpectrumGrid& s);
SpectrumGrid read_spectrum(std::istream& in);
void save_spectrum(const SpectrumGrid& s, const std::string& path);
SpectrumGrid load_spectrum(const std::string& path);

struct RealMap {
  FrequencyAxis omega2;
  FrequencyAxis omega3;
  std::string quantity;
  Eigen::MatrixXd values;
};

void write_map(std::ostream& out, const RealMap& m);
RealMap read_map(std::istream& in);
void save_map(const RealMap& m, const std::string& path);
RealMap load_map(const std::string& path);

/// "#POLDQC-PEAKS v1" then "#columns omega2 omega3 magnitude assignment".
void write_peaks(std::ostream& out, const std::vector<Peak>& peaks);

}  // namespace poldqc
