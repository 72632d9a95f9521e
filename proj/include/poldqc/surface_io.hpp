#pragma once

#include <iosfwd>
#include <string>

#include "poldqc/model.hpp"

namespace poldqc {

// Text format, UTF-8 with LF line endings:
//
//   #POLDQC-SURFACE v1
//   #key=value                      (metadata, any number)
//   #axis <label> <n> <min> <max> <mass>   (one per axis, storage order)
//   #columns V mu
//   <V> <mu>                        (total_points rows, last axis fastest)
//
// Values are written with 17 significant digits so a load reproduces the
// saved doubles exactly. External surfaces can be ingested through the same
// format.

void write_surface_set(std::ostream& out, const SurfaceSet& s);
SurfaceSet read_surface_set(std::istream& in);

void save_surface_set(const SurfaceSet& s, const std::string& path);
SurfaceSet load_surface_set(const std::string& path);

// Shared by the other text formats.
void write_axis_line(std::ostream& out, const Axis& ax);
Axis parse_axis_line(const std::string& line, std::size_t line_no);

}  // namespace poldqc
