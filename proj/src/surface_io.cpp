#include "poldqc/surface_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "poldqc/errors.hpp"
#include "poldqc/text_format.hpp"

namespace poldqc {

namespace {
constexpr const char* kMagic = "#POLDQC-SURFACE";
constexpr const char* kVersion = "v1";
}  // namespace

void write_axis_line(std::ostream& out, const Axis& ax) {
  using text::format_double;
  out << "#axis " << ax.label << ' ' << ax.n_points << ' ' << format_double(ax.min) << ' ' << format_double(ax.max)
      << ' ' << format_double(ax.mass) << '\n';
}

Axis parse_axis_line(const std::string& line, std::size_t line_no) {
  const auto tok = text::split_whitespace(line);
  if (tok.size() != 6 || tok[0] != "#axis") {
    throw ParseError(line_no, "expected '#axis <label> <n> <min> <max> <mass>'");
  }
  const long long n = text::parse_integer(tok[2], line_no);
  if (n <= 0) throw ParseError(line_no, "axis size must be positive");
  try {
    return make_axis(tok[1], static_cast<std::size_t>(n), text::parse_double(tok[3], line_no),
                     text::parse_double(tok[4], line_no), text::parse_double(tok[5], line_no));
  } catch (const ValidationError& e) {
    throw ParseError(line_no, e.what());
  }
}

void write_surface_set(std::ostream& out, const SurfaceSet& s) {
  const std::size_t n = s.grid.total_points();
  if (static_cast<std::size_t>(s.potential.size()) != n || static_cast<std::size_t>(s.dipole.size()) != n) {
    throw ShapeError("surface arrays do not match the grid");
  }
  out << kMagic << ' ' << kVersion << '\n';
  Metadata md = s.metadata;
  md["variant"] = to_string(s.variant);
  for (const auto& [k, v] : md) out << '#' << k << '=' << v << '\n';
  for (const auto& ax : s.grid.axes()) write_axis_line(out, ax);
  out << "#columns V mu\n";
  for (std::size_t k = 0; k < n; ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    out << text::format_double(s.potential[i]) << ' ' << text::format_double(s.dipole[i]) << '\n';
  }
}

SurfaceSet read_surface_set(std::istream& in) {
  text::LineReader reader(in);
  std::string line;
  if (!reader.next(line)) throw ParseError(1, "empty surface file");
  {
    const auto tok = text::split_whitespace(line);
    if (tok.empty() || tok[0] != kMagic) throw ParseError(1, "missing '#POLDQC-SURFACE' header");
    if (tok.size() != 2 || tok[1] != kVersion) {
      throw ParseError(1, "unknown surface file version '" + (tok.size() > 1 ? tok[1] : std::string()) + "'");
    }
  }

  SurfaceSet s;
  std::vector<Axis> axes;
  bool have_columns = false;
  while (!have_columns && reader.next(line)) {
    const std::size_t ln = reader.line_number();
    if (line.rfind("#axis", 0) == 0) {
      axes.push_back(parse_axis_line(line, ln));
    } else if (line.rfind("#columns", 0) == 0) {
      const auto tok = text::split_whitespace(line);
      if (tok.size() != 3 || tok[1] != "V" || tok[2] != "mu") throw ParseError(ln, "expected '#columns V mu'");
      have_columns = true;
    } else if (!line.empty() && line[0] == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos || eq == 1) throw ParseError(ln, "malformed metadata line, expected '#key=value'");
      s.metadata[line.substr(1, eq - 1)] = line.substr(eq + 1);
    } else {
      throw ParseError(ln, "data before '#columns' header");
    }
  }
  if (!have_columns) throw ParseError(reader.line_number(), "missing '#columns V mu' header");
  if (axes.empty()) throw ParseError(reader.line_number(), "no '#axis' lines");
  try {
    s.grid = ProductGrid(axes);
  } catch (const ValidationError& e) {
    throw ParseError(reader.line_number(), e.what());
  }
  const auto it = s.metadata.find("variant");
  try {
    s.variant = it == s.metadata.end() ? SurfaceVariant::Full : parse_variant(it->second);
  } catch (const ValidationError& e) {
    throw ParseError(0, e.what());
  }

  const std::size_t expected = s.grid.total_points();
  s.potential.resize(static_cast<Eigen::Index>(expected));
  s.dipole.resize(static_cast<Eigen::Index>(expected));
  std::size_t found = 0;
  while (reader.next(line)) {
    if (text::trim(line).empty()) continue;
    const std::size_t ln = reader.line_number();
    const auto tok = text::split_whitespace(line);
    if (tok.size() != 2) throw ParseError(ln, "expected two columns 'V mu'");
    if (found >= expected) {
      throw ParseError(ln, "value count mismatch: expected " + std::to_string(expected) + " rows, found more");
    }
    s.potential[static_cast<Eigen::Index>(found)] = text::parse_double(tok[0], ln);
    s.dipole[static_cast<Eigen::Index>(found)] = text::parse_double(tok[1], ln);
    ++found;
  }
  if (found != expected) {
    throw ParseError(reader.line_number(), "value count mismatch: expected " + std::to_string(expected) +
                                               " rows, found " + std::to_string(found));
  }
  return s;
}

void save_surface_set(const SurfaceSet& s, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError(0, "cannot write " + path);
  write_surface_set(out, s);
  if (!out) throw ParseError(0, "write failed for " + path);
}

SurfaceSet load_surface_set(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(0, "cannot open " + path);
  return read_surface_set(in);
}

}  // namespace poldqc
