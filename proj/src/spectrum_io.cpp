#include "poldqc/spectrum_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "poldqc/errors.hpp"
#include "poldqc/text_format.hpp"

namespace poldqc {

namespace {

using text::format_double;

void write_axis(std::ostream& out, const char* name, const FrequencyAxis& a) {
  out << '#' << name << ' ' << format_double(a.start) << ' ' << format_double(a.step) << ' ' << a.n << '\n';
}

FrequencyAxis parse_axis(const std::vector<std::string>& tok, std::size_t ln) {
  if (tok.size() != 4) throw ParseError(ln, "expected '" + tok[0] + " <start> <step> <n>'");
  FrequencyAxis a{text::parse_double(tok[1], ln), text::parse_double(tok[2], ln),
                  static_cast<int>(text::parse_integer(tok[3], ln))};
  try {
    validate(a);
  } catch (const ValidationError& e) {
    throw ParseError(ln, e.what());
  }
  return a;
}

void check_magic(text::LineReader& reader, const std::string& magic) {
  std::string line;
  if (!reader.next(line)) throw ParseError(1, "empty file");
  const auto tok = text::split_whitespace(line);
  if (tok.empty() || tok[0] != magic) throw ParseError(1, "missing '" + magic + "' header");
  if (tok.size() != 2 || tok[1] != "v1") {
    throw ParseError(1, "unknown file version '" + (tok.size() > 1 ? tok[1] : std::string()) + "'");
  }
}

template <class Out>
void write_file(const std::string& path, const Out& write) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError(0, "cannot write " + path);
  write(out);
  if (!out) throw ParseError(0, "write failed for " + path);
}

}  // namespace

void write_spectrum(std::ostream& out, const SpectrumGrid& s) {
  if (s.values.rows() != s.omega2.n || s.values.cols() != s.omega3.n) throw ShapeError("spectrum shape mismatch");
  out << "#POLDQC-SPECTRUM v1\n";
  write_axis(out, "omega2_cm", s.omega2);
  write_axis(out, "omega3_cm", s.omega3);
  out << "#gamma_cm " << format_double(s.gamma_cm) << '\n';
  if (s.normalization) out << "#normalization " << format_double(*s.normalization) << '\n';
  out << "#columns omega2 omega3 re im abs\n";
  for (int i = 0; i < s.omega2.n; ++i) {
    const std::string w2 = format_double(s.omega2.at(i));
    for (int j = 0; j < s.omega3.n; ++j) {
      const complex v = s.values(i, j);
      out << w2 << ' ' << format_double(s.omega3.at(j)) << ' ' << format_double(v.real()) << ' '
          << format_double(v.imag()) << ' ' << format_double(std::abs(v)) << '\n';
    }
  }
}

SpectrumGrid read_spectrum(std::istream& in) {
  text::LineReader reader(in);
  check_magic(reader, "#POLDQC-SPECTRUM");
  SpectrumGrid s;
  bool have2 = false, have3 = false, have_gamma = false, have_columns = false;
  std::string line;
  while (!have_columns && reader.next(line)) {
    const std::size_t ln = reader.line_number();
    const auto tok = text::split_whitespace(line);
    if (tok.empty()) continue;
    if (tok[0] == "#omega2_cm") {
      s.omega2 = parse_axis(tok, ln);
      have2 = true;
    } else if (tok[0] == "#omega3_cm") {
      s.omega3 = parse_axis(tok, ln);
      have3 = true;
    } else if (tok[0] == "#gamma_cm" && tok.size() == 2) {
      s.gamma_cm = text::parse_double(tok[1], ln);
      have_gamma = true;
    } else if (tok[0] == "#normalization" && tok.size() == 2) {
      s.normalization = text::parse_double(tok[1], ln);
    } else if (tok[0] == "#columns") {
      if (tok.size() != 6 || tok[1] != "omega2" || tok[2] != "omega3" || tok[3] != "re" || tok[4] != "im" ||
          tok[5] != "abs") {
        throw ParseError(ln, "expected '#columns omega2 omega3 re im abs'");
      }
      have_columns = true;
    } else {
      throw ParseError(ln, "unexpected header line '" + line + "'");
    }
  }
  if (!have2 || !have3 || !have_gamma || !have_columns) {
    throw ParseError(reader.line_number(), "incomplete spectrum header");
  }
  s.values.resize(s.omega2.n, s.omega3.n);
  const long long expected = static_cast<long long>(s.omega2.n) * s.omega3.n;
  long long found = 0;
  while (reader.next(line)) {
    const std::size_t ln = reader.line_number();
    const auto tok = text::split_whitespace(line);
    if (tok.empty()) continue;
    if (tok.size() != 5) throw ParseError(ln, "expected five columns");
    if (found >= expected) throw ParseError(ln, "value count mismatch: expected " + std::to_string(expected) + " rows, found more");
    const auto i = static_cast<int>(found / s.omega3.n);
    const auto j = static_cast<int>(found % s.omega3.n);
    s.values(i, j) = complex(text::parse_double(tok[2], ln), text::parse_double(tok[3], ln));
    ++found;
  }
  if (found != expected) {
    throw ParseError(reader.line_number(), "value count mismatch: expected " + std::to_string(expected) +
                                               " rows, found " + std::to_string(found));
  }
  return s;
}

void save_spectrum(const SpectrumGrid& s, const std::string& path) {
  write_file(path, [&](std::ostream& o) { write_spectrum(o, s); });
}

SpectrumGrid load_spectrum(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(0, "cannot open " + path);
  return read_spectrum(in);
}

void write_map(std::ostream& out, const RealMap& m) {
  if (m.values.rows() != m.omega2.n || m.values.cols() != m.omega3.n) throw ShapeError("map shape mismatch");
  out << "#POLDQC-MAP v1\n";
  out << "#quantity " << m.quantity << '\n';
  write_axis(out, "omega2_cm", m.omega2);
  write_axis(out, "omega3_cm", m.omega3);
  out << "#columns omega2 omega3 value\n";
  for (int i = 0; i < m.omega2.n; ++i) {
    const std::string w2 = format_double(m.omega2.at(i));
    for (int j = 0; j < m.omega3.n; ++j) {
      out << w2 << ' ' << format_double(m.omega3.at(j)) << ' ' << format_double(m.values(i, j)) << '\n';
    }
  }
}

RealMap read_map(std::istream& in) {
  text::LineReader reader(in);
  check_magic(reader, "#POLDQC-MAP");
  RealMap m;
  bool have2 = false, have3 = false, have_columns = false;
  std::string line;
  while (!have_columns && reader.next(line)) {
    const std::size_t ln = reader.line_number();
    const auto tok = text::split_whitespace(line);
    if (tok.empty()) continue;
    if (tok[0] == "#quantity" && tok.size() == 2) {
      m.quantity = tok[1];
    } else if (tok[0] == "#omega2_cm") {
      m.omega2 = parse_axis(tok, ln);
      have2 = true;
    } else if (tok[0] == "#omega3_cm") {
      m.omega3 = parse_axis(tok, ln);
      have3 = true;
    } else if (tok[0] == "#columns") {
      if (tok.size() != 4 || tok[3] != "value") throw ParseError(ln, "expected '#columns omega2 omega3 value'");
      have_columns = true;
    } else {
      throw ParseError(ln, "unexpected header line '" + line + "'");
    }
  }
  if (!have2 || !have3 || !have_columns) throw ParseError(reader.line_number(), "incomplete map header");
  m.values.resize(m.omega2.n, m.omega3.n);
  const long long expected = static_cast<long long>(m.omega2.n) * m.omega3.n;
  long long found = 0;
  while (reader.next(line)) {
    const std::size_t ln = reader.line_number();
    const auto tok = text::split_whitespace(line);
    if (tok.empty()) continue;
    if (tok.size() != 3) throw ParseError(ln, "expected three columns");
    if (found >= expected) throw ParseError(ln, "value count mismatch: expected " + std::to_string(expected) + " rows, found more");
    m.values(static_cast<int>(found / m.omega3.n), static_cast<int>(found % m.omega3.n)) = text::parse_double(tok[2], ln);
    ++found;
  }
  if (found != expected) {
    throw ParseError(reader.line_number(), "value count mismatch: expected " + std::to_string(expected) +
                                               " rows, found " + std::to_string(found));
  }
  return m;
}

void save_map(const RealMap& m, const std::string& path) {
  write_file(path, [&](std::ostream& o) { write_map(o, m); });
}

RealMap load_map(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(0, "cannot open " + path);
  return read_map(in);
}

void write_peaks(std::ostream& out, const std::vector<Peak>& peaks) {
  out << "#POLDQC-PEAKS v1\n#columns omega2 omega3 magnitude assignment\n";
  for (const auto& p : peaks) {
    out << format_double(p.omega2) << ' ' << format_double(p.omega3) << ' ' << format_double(p.magnitude) << ' '
        << (p.assignment.empty() ? "-" : p.assignment) << '\n';
  }
}

}  // namespace poldqc
