#include "poldqc/basis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <ostream>

#include "poldqc/errors.hpp"
#include "poldqc/hermite.hpp"
#include "poldqc/units.hpp"

namespace poldqc {

int BareLabel::matter_quanta() const { return std::accumulate(v.begin(), v.end(), 0); }

std::string BareLabel::text() const {
  std::string s = "|";
  if (v.size() == 1) {
    s += std::to_string(v[0]) + ",";
  } else {
    for (int x : v) s += std::to_string(x);
    s += ",";
  }
  return s + std::to_string(n) + ">";
}

MolecularStates1D molecular_eigenstates_1d(const MorseParams& morse, const Axis& axis, int n_v,
                                           const RelaxationConfig& cfg) {
  validate(morse);
  if (n_v < 1) throw ValidationError("n_v must be at least 1");
  if (n_v > morse.bound_state_count()) {
    throw ValidationError("n_v = " + std::to_string(n_v) + " exceeds the " +
                          std::to_string(morse.bound_state_count()) + " bound Morse states");
  }
  if (axis.is_photon()) throw ValidationError("molecular states need an r axis");
  Axis a = axis;
  a.label = "r1";
  const ProductGrid grid({a});
  Eigen::VectorXd v = grid.tabulate([&](std::span<const double> x) { return morse_potential(x[0], morse); });
  RelaxationConfig c = cfg;
  c.n_states = n_v;
  const RelaxedStates rs = relax_lowest(Hamiltonian(grid, std::move(v)), c);

  MolecularStates1D out;
  out.axis = axis;
  out.energies = rs.energies;
  const double root_d = std::sqrt(a.spacing());
  for (std::size_t k = 0; k < rs.states.size(); ++k) {
    Eigen::VectorXd f = rs.states[k] / root_d;
    const double e = rs.energies[k];
    double r_turn = a.max;
    if (e < morse.depth) r_turn = morse.re - std::log(1.0 - std::sqrt(e / morse.depth)) / morse.range;
    const auto i = static_cast<Eigen::Index>(
        std::clamp(std::lround((r_turn - a.min) / a.spacing()), 0L, static_cast<long>(a.n_points) - 1));
    // Step inward until the value is clearly nonzero so the sign is well defined.
    Eigen::Index j = i;
    while (j > 0 && std::abs(f[j]) < 1e-3 * f.cwiseAbs().maxCoeff()) --j;
    if (f[j] < 0.0) f = -f;
    out.functions.push_back(std::move(f));
  }
  return out;
}

Eigen::VectorXd photon_eigenfunction(int n, double omega_c, const Axis& axis, double center) {
  if (n < 0) throw ValidationError("photon number must be non-negative");
  if (!(omega_c > 0.0)) throw ValidationError("omega_c must be positive");
  Eigen::VectorXd f(static_cast<Eigen::Index>(axis.n_points));
  for (std::size_t i = 0; i < axis.n_points; ++i) {
    f[static_cast<Eigen::Index>(i)] = oscillator_function(n, 1.0, omega_c, center, axis.coordinate(i));
  }
  const double root_d = std::sqrt(axis.spacing());
  f /= f.norm() * root_d;
  const double edge = std::max(std::abs(f[0]), std::abs(f[f.size() - 1])) * root_d;
  if (edge > 1e-6) {
    throw BoundaryLeakError("photon level " + std::to_string(n) + " has edge amplitude " + std::to_string(edge) +
                                " on axis " + axis.label,
                            edge);
  }
  return f;
}

namespace {

struct LocalTerm {
  double coefficient;
  std::vector<int> v;  // local quanta per molecule
};

std::vector<LocalTerm> local_expansion(const BareLabel& l) {
  if (l.v.size() == 1) return {{1.0, l.v}};
  const double h = 1.0 / std::sqrt(2.0);
  const int s = l.v[0];
  const int a = l.v[1];
  if (s == 0 && a == 0) return {{1.0, {0, 0}}};
  if (s == 1 && a == 0) return {{h, {1, 0}}, {h, {0, 1}}};
  if (s == 0 && a == 1) return {{h, {1, 0}}, {-h, {0, 1}}};
  if (s == 2 && a == 0) return {{h, {2, 0}}, {h, {0, 2}}};
  if (s == 0 && a == 2) return {{h, {2, 0}}, {-h, {0, 2}}};
  if (s == 1 && a == 1) return {{1.0, {1, 1}}};
  throw ValidationError("no local-mode expansion for " + l.text());
}

std::vector<std::vector<int>> matter_labels(int n_mol, int quanta) {
  if (n_mol == 1) return {{quanta}};
  switch (quanta) {
    case 0:
      return {{0, 0}};
    case 1:
      return {{1, 0}, {0, 1}};
    case 2:
      return {{2, 0}, {0, 2}, {1, 1}};
    default:
      throw ValidationError("two-molecule bare basis supports at most 2 matter quanta");
  }
}

}  // namespace

std::vector<BareState> build_bare_basis(const ProductGrid& grid, const MorseParams& morse, double omega_c,
                                        const BareBasisOptions& opt) {
  if (!grid.has_photon_axis()) throw ValidationError("bare basis needs a photon axis");
  const int n_mol = static_cast<int>(grid.n_molecular_axes());
  if (n_mol < 1 || n_mol > 2) throw ValidationError("bare basis supports 1 or 2 molecules");
  if (opt.n_v_max < 0 || opt.n_photon_max < 0) throw ValidationError("basis limits must be non-negative");
  if (opt.n_photon_max > 4) throw ValidationError("photon number limited to 4");
  if (n_mol == 2 && opt.n_v_max > 2) throw ValidationError("two-molecule bare basis supports n_v_max <= 2");

  std::vector<MolecularStates1D> mol;
  for (int m = 0; m < n_mol; ++m) {
    if (m == 1 && grid.axis(1).n_points == grid.axis(0).n_points && grid.axis(1).min == grid.axis(0).min &&
        grid.axis(1).max == grid.axis(0).max && grid.axis(1).mass == grid.axis(0).mass) {
      mol.push_back(mol.front());
      mol.back().axis = grid.axis(1);
      continue;
    }
    mol.push_back(molecular_eigenstates_1d(morse, grid.axis(static_cast<std::size_t>(m)), opt.n_v_max + 1, opt.relax));
  }
  const Axis& qax = grid.axis(grid.rank() - 1);
  std::vector<Eigen::VectorXd> photon;
  for (int n = 0; n <= opt.n_photon_max; ++n) photon.push_back(photon_eigenfunction(n, omega_c, qax, opt.photon_center));

  const int qmax = std::max(opt.n_v_max, opt.n_photon_max);
  std::vector<BareState> out;
  for (int q = 0; q <= qmax; ++q) {
    std::vector<BareState> shell;
    for (int vq = 0; vq <= std::min(q, opt.n_v_max); ++vq) {
      const int n = q - vq;
      if (n > opt.n_photon_max) continue;
      for (const auto& v : matter_labels(n_mol, vq)) {
        BareState b;
        b.label = BareLabel{v, n};
        const auto terms = local_expansion(b.label);
        Eigen::VectorXd amps = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid.total_points()));
        for (const auto& t : terms) {
          for (std::size_t k = 0; k < grid.total_points(); ++k) {
            std::size_t rem = k;
            double val = t.coefficient;
            for (std::size_t a = 0; a < grid.rank(); ++a) {
              const std::size_t i = rem / grid.stride(a);
              rem %= grid.stride(a);
              const auto ii = static_cast<Eigen::Index>(i);
              val *= a + 1 == grid.rank() ? photon[static_cast<std::size_t>(n)][ii]
                                          : mol[a].functions[static_cast<std::size_t>(t.v[a])][ii];
            }
            amps[static_cast<Eigen::Index>(k)] += val;
          }
        }
        double e = omega_c * (n + 0.5);
        for (std::size_t m = 0; m < terms.front().v.size(); ++m) {
          e += mol[m].energies[static_cast<std::size_t>(terms.front().v[m])];
        }
        b.energy = e;
        b.function = Wavefunction(grid, amps.cast<complex>());
        shell.push_back(std::move(b));
      }
    }
    std::stable_sort(shell.begin(), shell.end(),
                     [](const BareState& a, const BareState& b) { return a.energy < b.energy - 1e-12; });
    for (auto& b : shell) out.push_back(std::move(b));
  }
  return out;
}

namespace {

constexpr double kDegeneracyTolerance = 1e-9;

std::string plain_name(const BareLabel& l) {
  static const std::map<std::pair<std::vector<int>, int>, std::string> one{
      {{{1}, 0}, "e"}, {{{0}, 1}, "p(1)"}, {{{2}, 0}, "f"}, {{{0}, 2}, "p(2)"}, {{{1}, 1}, "e+p"}};
  static const std::map<std::pair<std::vector<int>, int>, std::string> two{
      {{{1, 0}, 0}, "e"},  {{{0, 1}, 0}, "d1"}, {{{0, 0}, 1}, "p(1)"}, {{{2, 0}, 0}, "f"},   {{{0, 2}, 0}, "d2"},
      {{{1, 1}, 0}, "f2"}, {{{0, 1}, 1}, "d3"}, {{{1, 0}, 1}, "e+p"},  {{{0, 0}, 2}, "p(2)"}};
  const auto& m = l.v.size() == 1 ? one : two;
  const auto it = m.find({l.v, l.n});
  return it == m.end() ? l.text() : it->second;
}

/// Rotates rows of exactly degenerate eigenstates onto the bare states they
/// overlap most (orthogonal Procrustes on the k dominant columns).
int align_degenerate_rows(Eigen::MatrixXd& c, const std::vector<double>& energies, double tol) {
  int rotated = 0;
  const auto n = static_cast<Eigen::Index>(energies.size());
  Eigen::Index start = 0;
  while (start < n) {
    Eigen::Index end = start + 1;
    while (end < n && energies[static_cast<std::size_t>(end)] - energies[static_cast<std::size_t>(end - 1)] <= tol) ++end;
    const Eigen::Index k = end - start;
    if (k > 1 && k <= c.cols()) {
      const Eigen::MatrixXd block = c.middleRows(start, k);
      const Eigen::VectorXd colw = block.cwiseAbs2().colwise().sum().transpose();
      std::vector<Eigen::Index> cols(static_cast<std::size_t>(c.cols()));
      std::iota(cols.begin(), cols.end(), Eigen::Index{0});
      std::stable_sort(cols.begin(), cols.end(), [&](Eigen::Index a, Eigen::Index b) { return colw[a] > colw[b]; });
      Eigen::MatrixXd b(k, k);
      for (Eigen::Index j = 0; j < k; ++j) b.col(j) = block.col(cols[static_cast<std::size_t>(j)]);
      const Eigen::JacobiSVD<Eigen::MatrixXd> svd(b, Eigen::ComputeFullU | Eigen::ComputeFullV);
      const Eigen::MatrixXd r = svd.matrixV() * svd.matrixU().transpose();
      c.middleRows(start, k) = r * block;
      ++rotated;
    }
    start = end;
  }
  return rotated;
}

}  // namespace

DecompositionTable decompose(const EigenSolution& eig, const std::vector<BareState>& basis) {
  if (eig.states.empty()) throw ValidationError("eigen solution carries no wavefunctions");
  if (basis.empty()) throw ValidationError("empty bare basis");
  for (const auto& b : basis) {
    if (!(b.function.grid() == eig.states.front().grid())) throw ShapeError("bare basis and eigenstates grids differ");
  }
  const auto nr = static_cast<Eigen::Index>(eig.states.size());
  const auto nc = static_cast<Eigen::Index>(basis.size());
  DecompositionTable t;
  for (const auto& b : basis) t.columns.push_back(b.label);
  t.coefficients.resize(nr, nc);
  for (Eigen::Index i = 0; i < nr; ++i) {
    for (Eigen::Index j = 0; j < nc; ++j) {
      t.coefficients(i, j) =
          inner_product(basis[static_cast<std::size_t>(j)].function, eig.states[static_cast<std::size_t>(i)]).real();
    }
  }
  if (const int k = align_degenerate_rows(t.coefficients, eig.energies, kDegeneracyTolerance); k > 0) {
    t.notes.push_back(std::to_string(k) + " degenerate cluster(s) aligned to the bare basis");
  }
  t.weights = t.coefficients.cwiseAbs2();
  for (Eigen::Index i = 0; i < nr; ++i) {
    t.residual.push_back(1.0 - t.weights.row(i).sum());
    t.energies_cm.push_back((eig.energies[static_cast<std::size_t>(i)] - eig.energies[0]) * units::hartree_to_cm);
  }

  // Row labels.
  t.row_labels.assign(static_cast<std::size_t>(nr), "");
  std::map<int, std::vector<Eigen::Index>> hybrids;  // manifold -> rows in energy order
  for (Eigen::Index i = 0; i < nr; ++i) {
    const auto row = static_cast<std::size_t>(i);
    if (i == eig.partition.g) {
      t.row_labels[row] = "g";
      continue;
    }
    Eigen::Index jmax = 0;
    const double wmax = t.weights.row(i).maxCoeff(&jmax);
    if (wmax < 0.4) {
      t.row_labels[row] = "mixed";
      t.notes.push_back("row " + std::to_string(i) + " has no bare component with weight >= 0.4");
      continue;
    }
    bool photon = false;
    bool matter = false;
    for (Eigen::Index j = 0; j < nc; ++j) {
      if (t.weights(i, j) < 0.1) continue;
      const auto& l = t.columns[static_cast<std::size_t>(j)];
      if (l.n > 0) photon = true;
      if (l.n == 0 && l.matter_quanta() > 0) matter = true;
    }
    if (photon && matter) {
      hybrids[t.columns[static_cast<std::size_t>(jmax)].total_quanta()].push_back(i);
    } else {
      t.row_labels[row] = plain_name(t.columns[static_cast<std::size_t>(jmax)]);
    }
  }
  for (const auto& [k, rows] : hybrids) {
    const std::string m = "(" + std::to_string(k) + ")";
    std::vector<std::string> names;
    if (rows.size() == 2) {
      names = {"LP" + m, "UP" + m};
    } else if (rows.size() == 3) {
      names = {"LP" + m, "MP" + m, "UP" + m};
    } else {
      for (std::size_t r = 0; r < rows.size(); ++r) names.push_back("P" + m + "#" + std::to_string(r + 1));
    }
    for (std::size_t r = 0; r < rows.size(); ++r) t.row_labels[static_cast<std::size_t>(rows[r])] = names[r];
  }
  std::map<std::string, int> seen;
  for (auto& l : t.row_labels) {
    const int c = seen[l]++;
    if (c > 0) l += std::string(static_cast<std::size_t>(c), '\'');
  }
  return t;
}

void write_decomposition_csv(std::ostream& out, const DecompositionTable& t) {
  out << "state,energy_cm";
  for (const auto& c : t.columns) out << ',' << c.text();
  out << ",residual\n";
  char buf[64];
  for (std::size_t i = 0; i < t.row_labels.size(); ++i) {
    out << t.row_labels[i];
    std::snprintf(buf, sizeof buf, ",%.4f", t.energies_cm[i]);
    out << buf;
    for (Eigen::Index j = 0; j < t.weights.cols(); ++j) {
      std::snprintf(buf, sizeof buf, ",%.4f", t.weights(static_cast<Eigen::Index>(i), j));
      out << buf;
    }
    std::snprintf(buf, sizeof buf, ",%.4f", std::abs(t.residual[i]) < 5e-5 ? 0.0 : t.residual[i]);
    out << buf << '\n';
  }
}

}  // namespace poldqc
