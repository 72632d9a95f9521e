#include "poldqc/eigen_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "poldqc/errors.hpp"
#include "poldqc/surface_io.hpp"
#include "poldqc/text_format.hpp"

namespace poldqc {

namespace {

constexpr const char* kMagic = "#POLDQC-EIGEN";
constexpr const char* kVersion = "v1";
constexpr std::size_t kWfHeader = 64;

std::string join(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

std::vector<int> parse_list(const std::string& s, std::size_t line) {
  std::vector<int> out;
  if (s.empty()) return out;
  for (const auto& tok : text::split(s, ',')) out.push_back(static_cast<int>(text::parse_integer(tok, line)));
  return out;
}

std::uint64_t to_le(std::uint64_t x) {
  if constexpr (std::endian::native == std::endian::little) {
    return x;
  } else {
    std::uint64_t y = 0;
    for (int i = 0; i < 8; ++i) y |= ((x >> (8 * i)) & 0xffU) << (8 * (7 - i));
    return y;
  }
}

}  // namespace

void write_eigen_solution(std::ostream& out, const EigenSolution& sol) {
  const auto n = static_cast<Eigen::Index>(sol.energies.size());
  if (sol.dipoles.rows() != n || sol.dipoles.cols() != n) throw ShapeError("dipole matrix does not match energies");
  out << kMagic << ' ' << kVersion << '\n';
  for (const auto& [k, v] : sol.metadata) out << '#' << k << '=' << v << '\n';
  for (const auto& ax : sol.grid.axes()) write_axis_line(out, ax);
  out << "#omega_ref_au " << text::format_double(sol.partition.omega_ref) << '\n';
  out << "#energies_hartree\n";
  for (double e : sol.energies) out << text::format_double(e) << '\n';
  out << "#dipoles_au\n";
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) out << (j ? " " : "") << text::format_double(sol.dipoles(i, j));
    out << '\n';
  }
  out << "#partition g=" << sol.partition.g << " e=" << join(sol.partition.e_set) << " f=" << join(sol.partition.f_set)
      << '\n';
}

EigenSolution read_eigen_solution(std::istream& in) {
  text::LineReader reader(in);
  std::string line;
  if (!reader.next(line)) throw ParseError(1, "empty eigen file");
  {
    const auto tok = text::split_whitespace(line);
    if (tok.empty() || tok[0] != kMagic) throw ParseError(1, "missing '#POLDQC-EIGEN' header");
    if (tok.size() != 2 || tok[1] != kVersion) {
      throw ParseError(1, "unknown eigen file version '" + (tok.size() > 1 ? tok[1] : std::string()) + "'");
    }
  }
  EigenSolution sol;
  std::vector<Axis> axes;
  std::vector<std::vector<double>> rows;
  enum class Block { Header, Energies, Dipoles } block = Block::Header;
  bool have_partition = false;
  bool have_omega = false;
  while (reader.next(line)) {
    const std::size_t ln = reader.line_number();
    if (text::trim(line).empty()) continue;
    if (line.rfind("#axis", 0) == 0) {
      axes.push_back(parse_axis_line(line, ln));
    } else if (line.rfind("#omega_ref_au", 0) == 0) {
      const auto tok = text::split_whitespace(line);
      if (tok.size() != 2) throw ParseError(ln, "expected '#omega_ref_au <value>'");
      sol.partition.omega_ref = text::parse_double(tok[1], ln);
      have_omega = true;
    } else if (line == "#energies_hartree") {
      block = Block::Energies;
    } else if (line == "#dipoles_au") {
      block = Block::Dipoles;
    } else if (line.rfind("#partition", 0) == 0) {
      const auto tok = text::split_whitespace(line);
      if (tok.size() != 4 || tok[1].rfind("g=", 0) != 0 || tok[2].rfind("e=", 0) != 0 || tok[3].rfind("f=", 0) != 0) {
        throw ParseError(ln, "expected '#partition g=<i> e=<list> f=<list>'");
      }
      sol.partition.g = static_cast<int>(text::parse_integer(tok[1].substr(2), ln));
      sol.partition.e_set = parse_list(tok[2].substr(2), ln);
      sol.partition.f_set = parse_list(tok[3].substr(2), ln);
      have_partition = true;
    } else if (line[0] == '#') {
      if (block != Block::Header) throw ParseError(ln, "metadata after data blocks");
      const auto eq = line.find('=');
      if (eq == std::string::npos || eq == 1) throw ParseError(ln, "malformed metadata line, expected '#key=value'");
      sol.metadata[line.substr(1, eq - 1)] = line.substr(eq + 1);
    } else if (block == Block::Energies) {
      const auto tok = text::split_whitespace(line);
      if (tok.size() != 1) throw ParseError(ln, "expected one energy per line");
      sol.energies.push_back(text::parse_double(tok[0], ln));
    } else if (block == Block::Dipoles) {
      std::vector<double> row;
      for (const auto& t : text::split_whitespace(line)) row.push_back(text::parse_double(t, ln));
      if (row.size() != sol.energies.size()) {
        throw ParseError(ln, "dipole row has " + std::to_string(row.size()) + " values, expected " +
                                 std::to_string(sol.energies.size()));
      }
      rows.push_back(std::move(row));
    } else {
      throw ParseError(ln, "unexpected data line");
    }
  }
  const std::size_t end = reader.line_number();
  if (axes.empty()) throw ParseError(end, "no '#axis' lines");
  if (!have_partition) throw ParseError(end, "missing '#partition' line");
  if (!have_omega) throw ParseError(end, "missing '#omega_ref_au' line");
  if (rows.size() != sol.energies.size()) {
    throw ParseError(end, "dipole matrix has " + std::to_string(rows.size()) + " rows, expected " +
                              std::to_string(sol.energies.size()));
  }
  try {
    sol.grid = ProductGrid(axes);
  } catch (const ValidationError& e) {
    throw ParseError(end, e.what());
  }
  const auto n = static_cast<Eigen::Index>(rows.size());
  sol.dipoles.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) sol.dipoles(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  const auto check = [&](const std::vector<int>& idx) {
    for (int i : idx) {
      if (i < 0 || i >= n) throw ParseError(end, "partition index " + std::to_string(i) + " out of range");
    }
  };
  check(sol.partition.e_set);
  check(sol.partition.f_set);
  check({sol.partition.g});
  for (int i = 1; i < n; ++i) {
    const bool in_e = std::find(sol.partition.e_set.begin(), sol.partition.e_set.end(), i) != sol.partition.e_set.end();
    const bool in_f = std::find(sol.partition.f_set.begin(), sol.partition.f_set.end(), i) != sol.partition.f_set.end();
    if (!in_e && !in_f) sol.partition.unclassified.push_back(i);
  }
  return sol;
}

void write_wavefunctions(std::ostream& out, const std::vector<Wavefunction>& states) {
  const std::size_t total = states.empty() ? 0 : states.front().grid().total_points();
  std::string header = "POLDQC-WF v1 " + std::to_string(states.size()) + " " + std::to_string(total);
  header.resize(kWfHeader - 1, ' ');
  header.push_back('\n');
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  std::vector<char> buf(total * 8);
  for (const auto& s : states) {
    if (s.grid().total_points() != total) throw ShapeError("states have different sizes");
    for (std::size_t k = 0; k < total; ++k) {
      const std::uint64_t bits = to_le(std::bit_cast<std::uint64_t>(s.amplitudes()[static_cast<Eigen::Index>(k)].real()));
      std::memcpy(buf.data() + 8 * k, &bits, 8);
    }
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  }
}

std::vector<Wavefunction> read_wavefunctions(std::istream& in, const ProductGrid& grid) {
  std::string header(kWfHeader, '\0');
  in.read(header.data(), static_cast<std::streamsize>(kWfHeader));
  if (in.gcount() != static_cast<std::streamsize>(kWfHeader)) throw ParseError(0, "truncated wavefunction header");
  if (header.back() != '\n') throw ParseError(0, "malformed wavefunction header");
  header.pop_back();
  const auto tok = text::split_whitespace(header);
  if (tok.size() != 4 || tok[0] != "POLDQC-WF") throw ParseError(0, "missing 'POLDQC-WF' header");
  if (tok[1] != "v1") throw ParseError(0, "unknown wavefunction file version '" + tok[1] + "'");
  const auto n = static_cast<std::size_t>(text::parse_integer(tok[2], 0));
  const auto total = static_cast<std::size_t>(text::parse_integer(tok[3], 0));
  if (total != grid.total_points()) {
    throw ParseError(0, "wavefunction size " + std::to_string(total) + " does not match grid size " +
                            std::to_string(grid.total_points()));
  }
  std::vector<Wavefunction> out;
  std::vector<char> buf(total * 8);
  for (std::size_t i = 0; i < n; ++i) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (in.gcount() != static_cast<std::streamsize>(buf.size())) throw ParseError(0, "truncated wavefunction data");
    Eigen::VectorXcd a(static_cast<Eigen::Index>(total));
    for (std::size_t k = 0; k < total; ++k) {
      std::uint64_t bits = 0;
      std::memcpy(&bits, buf.data() + 8 * k, 8);
      a[static_cast<Eigen::Index>(k)] = std::bit_cast<double>(to_le(bits));
    }
    out.emplace_back(grid, std::move(a));
  }
  return out;
}

std::string wavefunction_sidecar_path(const std::string& eigen_path) { return eigen_path + ".wf"; }

void save_eigen_solution(const EigenSolution& sol, const std::string& path, bool sidecar) {
  {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError(0, "cannot write " + path);
    write_eigen_solution(out, sol);
    if (!out) throw ParseError(0, "write failed for " + path);
  }
  if (sidecar && !sol.states.empty()) {
    const std::string wf = wavefunction_sidecar_path(path);
    std::ofstream out(wf, std::ios::binary);
    if (!out) throw ParseError(0, "cannot write " + wf);
    write_wavefunctions(out, sol.states);
    if (!out) throw ParseError(0, "write failed for " + wf);
  }
}

EigenSolution load_eigen_solution(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(0, "cannot open " + path);
  EigenSolution sol = read_eigen_solution(in);
  const std::string wf = wavefunction_sidecar_path(path);
  if (std::filesystem::exists(wf)) {
    std::ifstream win(wf, std::ios::binary);
    sol.states = read_wavefunctions(win, sol.grid);
    if (sol.states.size() != sol.energies.size()) {
      throw ParseError(0, "sidecar holds " + std::to_string(sol.states.size()) + " states, eigen file " +
                              std::to_string(sol.energies.size()));
    }
  }
  return sol;
}

}  // namespace poldqc
