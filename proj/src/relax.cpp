#include "poldqc/relax.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "poldqc/errors.hpp"
#include "poldqc/hermite.hpp"
#include "poldqc/text_format.hpp"
#include "poldqc/units.hpp"

namespace poldqc {

void validate(const RelaxationConfig& cfg) {
  if (cfg.n_states < 1) throw ValidationError("n_states must be at least 1");
  if (!(cfg.dt_imag > 0.0)) throw ValidationError("dt_imag must be positive");
  if (cfg.krylov_order < 4) throw ValidationError("krylov_order must be at least 4");
  if (!(cfg.energy_tol > 0.0)) throw ValidationError("energy_tol must be positive");
  if (cfg.max_steps < 1) throw ValidationError("max_steps must be at least 1");
  if (cfg.convergence_window < 1) throw ValidationError("convergence_window must be at least 1");
}

ManifoldPartition partition_manifolds(std::span<const double> energies, double omega_ref) {
  if (!(omega_ref > 0.0)) throw PartitionError("omega_ref must be positive");
  if (energies.empty()) throw PartitionError("no energies");
  for (std::size_t i = 1; i < energies.size(); ++i) {
    if (energies[i] < energies[i - 1] - 1e-9) throw PartitionError("energies are not ascending");
  }
  ManifoldPartition p;
  p.omega_ref = omega_ref;
  p.g = 0;
  for (std::size_t i = 1; i < energies.size(); ++i) {
    const double x = (energies[i] - energies[0]) / omega_ref;
    const int idx = static_cast<int>(i);
    if (x > p.e_window.first && x < p.e_window.second) {
      p.e_set.push_back(idx);
    } else if (x > p.f_window.first && x < p.f_window.second) {
      p.f_set.push_back(idx);
    } else {
      p.unclassified.push_back(idx);
    }
  }
  if (p.e_set.empty()) throw PartitionError("no states in the single-excitation window");
  if (p.f_set.empty()) throw PartitionError("no states in the double-excitation window");
  return p;
}

std::vector<std::string> partition_warnings(const ManifoldPartition& p, std::span<const double> energies) {
  std::vector<std::string> out;
  for (int i : p.unclassified) {
    std::ostringstream msg;
    msg << "state " << i << " at " << (energies[static_cast<std::size_t>(i)] - energies[0]) / p.omega_ref
        << " omega_ref is outside the e/f windows and is excluded from spectra";
    out.push_back(msg.str());
  }
  return out;
}

Hamiltonian::Hamiltonian(const ProductGrid& grid, Eigen::VectorXd potential)
    : kinetic_(std::make_shared<KineticOperator>(grid)), potential_(std::move(potential)) {
  if (static_cast<std::size_t>(potential_.size()) != grid.total_points()) {
    throw ShapeError("potential length does not match the grid");
  }
}

Eigen::VectorXd Hamiltonian::apply(const Eigen::VectorXd& psi) const {
  Eigen::VectorXd out = kinetic_->apply(psi);
  out.array() += potential_.array() * psi.array();
  return out;
}

Eigen::VectorXcd Hamiltonian::apply(const Eigen::VectorXcd& psi) const {
  Eigen::VectorXcd out = kinetic_->apply(psi);
  out.array() += potential_.array().cast<complex>() * psi.array();
  return out;
}

double Hamiltonian::expectation(const Eigen::VectorXd& psi) const { return psi.dot(apply(psi)) / psi.squaredNorm(); }

Wavefunction krylov_imaginary_step(const Wavefunction& psi, const LinearOperator<Eigen::VectorXcd>& h, double tau,
                                   int order) {
  if (!(tau > 0.0)) throw ValidationError("imaginary time step must be positive");
  if (order < 1) throw ValidationError("Krylov order must be positive");
  const Eigen::VectorXcd& a = psi.amplitudes();
  if (a.norm() == 0.0) throw DegenerateInputError("zero wavefunction");
  auto step = krylov_imaginary_step<Eigen::VectorXcd>(a, h, tau, order);
  return normalize(Wavefunction(psi.grid(), std::move(step.state)));
}

namespace {

/// Products of one-dimensional eigenfunctions of potential cuts through the
/// global minimum, ordered by summed excitation energy.
class ProductFunctions {
 public:
  ProductFunctions(const ProductGrid& grid, const Eigen::VectorXd& v, bool symmetric, std::size_t count)
      : grid_(grid) {
    const std::size_t rank = grid.rank();
    Eigen::Index kmin = 0;
    v.minCoeff(&kmin);
    const auto idx = grid.unravel(static_cast<std::size_t>(kmin));
    levels_.resize(rank);
    excitation_.resize(rank);
    for (std::size_t a = 0; a < rank; ++a) {
      if (symmetric && a == 1) {
        levels_[1] = levels_[0];
        excitation_[1] = excitation_[0];
        continue;
      }
      Axis ax = grid.axis(a);
      if (!ax.is_photon()) ax.label = "r1";
      const KineticOperator t(ProductGrid({ax}));
      const auto n = static_cast<Eigen::Index>(ax.n_points);
      Eigen::MatrixXd h(n, n);
      for (Eigen::Index i = 0; i < n; ++i) h.col(i) = t.apply(Eigen::VectorXd::Unit(n, i).eval());
      h = 0.5 * (h + h.transpose()).eval();
      const std::size_t base = static_cast<std::size_t>(kmin) - idx[a] * grid.stride(a);
      for (Eigen::Index i = 0; i < n; ++i) h(i, i) += v[static_cast<Eigen::Index>(base + static_cast<std::size_t>(i) * grid.stride(a))];
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
      const Eigen::Index keep = std::min<Eigen::Index>(n, kLevels);
      for (Eigen::Index k = 0; k < keep; ++k) {
        levels_[a].push_back(es.eigenvectors().col(k));
        excitation_[a].push_back(es.eigenvalues()[k] - es.eigenvalues()[0]);
      }
    }
    std::vector<int> t(rank, 0);
    enumerate(0, t);
    std::stable_sort(tuples_.begin(), tuples_.end(),
                     [&](const auto& x, const auto& y) { return excitation(x) < excitation(y) - 1e-12; });
    if (tuples_.size() > count) tuples_.resize(count);
  }

  std::size_t size() const { return tuples_.size(); }

  Eigen::VectorXd product(std::size_t t) const {
    const auto& q = tuples_[t];
    Eigen::VectorXd out(static_cast<Eigen::Index>(grid_.total_points()));
    const std::size_t rank = grid_.rank();
    for (std::size_t k = 0; k < grid_.total_points(); ++k) {
      std::size_t rem = k;
      double val = 1.0;
      for (std::size_t a = 0; a < rank; ++a) {
        const std::size_t i = rem / grid_.stride(a);
        rem %= grid_.stride(a);
        val *= levels_[a][static_cast<std::size_t>(q[a])][static_cast<Eigen::Index>(i)];
      }
      out[static_cast<Eigen::Index>(k)] = val;
    }
    return out;
  }

 private:
  static constexpr Eigen::Index kLevels = 10;

  double excitation(const std::vector<int>& q) const {
    double e = 0.0;
    for (std::size_t a = 0; a < q.size(); ++a) e += excitation_[a][static_cast<std::size_t>(q[a])];
    return e;
  }
  void enumerate(std::size_t a, std::vector<int>& t) {
    if (a == t.size()) {
      tuples_.push_back(t);
      return;
    }
    for (std::size_t n = 0; n < levels_[a].size(); ++n) {
      t[a] = static_cast<int>(n);
      enumerate(a + 1, t);
    }
    t[a] = 0;
  }

  ProductGrid grid_;
  std::vector<std::vector<Eigen::VectorXd>> levels_;
  std::vector<std::vector<double>> excitation_;
  std::vector<std::vector<int>> tuples_;
};

/// Index map for r1 <-> r2, or empty if the grid has no such symmetry.
std::vector<Eigen::Index> exchange_permutation(const ProductGrid& grid) {
  if (grid.n_molecular_axes() != 2) return {};
  Axis a0 = grid.axis(0);
  Axis a1 = grid.axis(1);
  a1.label = a0.label;
  if (!(a0 == a1)) return {};
  const std::size_t n = a0.n_points;
  const std::size_t inner = grid.stride(1);
  std::vector<Eigen::Index> perm(grid.total_points());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < inner; ++k) {
        perm[(i * n + j) * inner + k] = static_cast<Eigen::Index>((j * n + i) * inner + k);
      }
    }
  }
  return perm;
}

Eigen::VectorXd permute(const Eigen::VectorXd& v, const std::vector<Eigen::Index>& perm) {
  Eigen::VectorXd out(v.size());
  for (Eigen::Index k = 0; k < v.size(); ++k) out[k] = v[perm[static_cast<std::size_t>(k)]];
  return out;
}

struct Sector {
  int parity = 0;  // +1, -1, or 0 for no symmetry projection
  std::vector<Eigen::VectorXd> states;
  std::vector<double> energies;
  std::vector<int> steps;
  std::vector<Eigen::VectorXd> guesses;  // Ritz vectors of the trial subspace
  std::size_t next_guess = 0;
  bool exhausted = false;
};

Sector make_sector(int parity) {
  Sector s;
  s.parity = parity;
  return s;
}

class SectorSolver {
 public:
  SectorSolver(const Hamiltonian& h, const RelaxationConfig& cfg, const std::vector<Eigen::Index>& perm)
      : h_(h), cfg_(cfg), perm_(perm) {}

  /// Ritz vectors of H in the sector projection of the product functions.
  void prepare(Sector& s, const ProductFunctions& pf) const {
    const auto n = static_cast<Eigen::Index>(h_.grid().total_points());
    std::vector<Eigen::VectorXd> cols;
    for (std::size_t t = 0; t < pf.size(); ++t) {
      Eigen::VectorXd v = pf.product(t);
      const double before = v.norm();
      if (s.parity != 0) v = 0.5 * (v + s.parity * permute(v, perm_));
      if (v.norm() > 1e-3 * before) cols.push_back(std::move(v));
    }
    if (cols.empty()) return;
    Eigen::MatrixXd x(n, static_cast<Eigen::Index>(cols.size()));
    for (std::size_t i = 0; i < cols.size(); ++i) x.col(static_cast<Eigen::Index>(i)) = cols[i];
    cols.clear();
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
    qr.setThreshold(1e-8);
    const Eigen::Index r = qr.rank();
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, r);
    x.resize(0, 0);
    Eigen::MatrixXd hq(n, r);
    for (Eigen::Index i = 0; i < r; ++i) {
      Eigen::VectorXd c = q.col(i);
      if (s.parity != 0) c = 0.5 * (c + s.parity * permute(c, perm_));
      q.col(i) = c;
      hq.col(i) = h_.apply(c);
    }
    Eigen::MatrixXd m = q.transpose() * hq;
    m = 0.5 * (m + m.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    const Eigen::MatrixXd ritz = q * es.eigenvectors();
    for (Eigen::Index i = 0; i < r; ++i) s.guesses.push_back(ritz.col(i));
  }

  Eigen::VectorXd fallback_guess(const Sector& s) const {
    std::mt19937_64 rng(0x5eedULL + s.next_guess + (s.parity < 0 ? 1000 : 0));
    std::normal_distribution<double> d;
    Eigen::VectorXd v(static_cast<Eigen::Index>(h_.grid().total_points()));
    for (Eigen::Index k = 0; k < v.size(); ++k) v[k] = d(rng);
    return v;
  }

  void project(Eigen::VectorXd& v, const Sector& s) const {
    if (s.parity != 0) v = 0.5 * (v + s.parity * permute(v, perm_));
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& x : s.states) v -= x.dot(v) * x;
    }
  }

  /// Relaxes the next state of sector s. Returns false if no admissible trial remains.
  bool next(Sector& s, int global_index) const {
    Eigen::VectorXd psi;
    while (true) {
      if (s.next_guess >= s.guesses.size() + 8) {
        s.exhausted = true;
        return false;
      }
      psi = s.next_guess < s.guesses.size() ? s.guesses[s.next_guess] : fallback_guess(s);
      ++s.next_guess;
      const double before = psi.norm();
      project(psi, s);
      if (psi.norm() > 1e-3 * before) break;
    }
    psi /= psi.norm();

    const LinearOperator<Eigen::VectorXd> op = [&](const Eigen::VectorXd& v) {
      Eigen::VectorXd w = h_.apply(v);
      if (s.parity != 0) w = 0.5 * (w + s.parity * permute(w, perm_));
      for (const auto& x : s.states) w -= x.dot(w) * x;
      return w;
    };

    std::vector<double> history;
    history.reserve(static_cast<std::size_t>(cfg_.max_steps));
    const auto window = static_cast<std::size_t>(cfg_.convergence_window);
    double last_delta = std::numeric_limits<double>::infinity();
    bool converged = false;
    int step = 0;
    for (step = 1; step <= cfg_.max_steps; ++step) {
      auto ks = krylov_imaginary_step<Eigen::VectorXd>(psi, op, cfg_.dt_imag, cfg_.krylov_order);
      psi = std::move(ks.state);
      project(psi, s);
      psi /= psi.norm();
      history.push_back(ks.energy);
      if (ks.breakdown) {
        converged = true;
        break;
      }
      if (history.size() > window) {
        last_delta = std::abs(history.back() - history[history.size() - 1 - window]);
        if (last_delta < cfg_.energy_tol) {
          converged = true;
          break;
        }
      }
    }
    if (!converged) {
      std::ostringstream msg;
      msg << "state " << global_index << " did not converge in " << cfg_.max_steps
          << " steps (last energy change " << last_delta << " hartree)";
      throw ConvergenceError(msg.str(), last_delta);
    }
    s.states.push_back(psi);
    s.energies.push_back(h_.expectation(psi));
    s.steps.push_back(std::min(step, cfg_.max_steps));
    if (cfg_.progress) {
      std::ostringstream msg;
      msg << "state " << global_index << " (parity " << s.parity << "): E = " << s.energies.back() << " hartree after "
          << s.steps.back() << " steps";
      cfg_.progress(msg.str());
    }
    return true;
  }

  /// Rotates the sector states to Ritz vectors of H in their span.
  void rayleigh_ritz(Sector& s) const {
    const std::size_t k = s.states.size();
    if (k == 0) return;
    const auto n = s.states.front().size();
    Eigen::MatrixXd x(n, static_cast<Eigen::Index>(k));
    for (std::size_t i = 0; i < k; ++i) x.col(static_cast<Eigen::Index>(i)) = s.states[i];
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(x);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, static_cast<Eigen::Index>(k));
    Eigen::MatrixXd hq(n, static_cast<Eigen::Index>(k));
    for (std::size_t i = 0; i < k; ++i) {
      Eigen::VectorXd col = q.col(static_cast<Eigen::Index>(i));
      if (s.parity != 0) col = 0.5 * (col + s.parity * permute(col, perm_));
      q.col(static_cast<Eigen::Index>(i)) = col;
      hq.col(static_cast<Eigen::Index>(i)) = h_.apply(col);
    }
    Eigen::MatrixXd m = q.transpose() * hq;
    m = 0.5 * (m + m.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    Eigen::MatrixXd rot = q * es.eigenvectors();
    for (std::size_t i = 0; i < k; ++i) {
      Eigen::VectorXd v = rot.col(static_cast<Eigen::Index>(i));
      v /= v.norm();
      detail::fix_phase(v);
      s.states[i] = std::move(v);
      s.energies[i] = es.eigenvalues()[static_cast<Eigen::Index>(i)];
    }
  }

 private:
  const Hamiltonian& h_;
  const RelaxationConfig& cfg_;
  const std::vector<Eigen::Index>& perm_;
};

double nth_lowest(std::vector<double> e, std::size_t n) {
  std::sort(e.begin(), e.end());
  return e[n - 1];
}

}  // namespace

RelaxedStates relax_lowest(const Hamiltonian& h, const RelaxationConfig& cfg) {
  validate(cfg);
  const ProductGrid& grid = h.grid();
  if (static_cast<std::size_t>(cfg.n_states) > grid.total_points()) {
    throw ValidationError("n_states exceeds the number of grid points");
  }

  std::vector<Eigen::Index> perm;
  if (cfg.use_exchange_symmetry) {
    perm = exchange_permutation(grid);
    if (!perm.empty()) {
      const Eigen::VectorXd& v = h.potential();
      const double scale = std::max(1.0, v.cwiseAbs().maxCoeff());
      if ((v - permute(v, perm)).cwiseAbs().maxCoeff() > 1e-10 * scale) perm.clear();
    }
  }
  const bool symmetric = !perm.empty();
  // A symmetrized copy keeps the sectors exactly decoupled.
  const Hamiltonian hs = symmetric ? Hamiltonian(grid, 0.5 * (h.potential() + permute(h.potential(), perm))) : h;

  const SectorSolver solver(hs, cfg, perm);
  std::vector<Sector> sectors;
  if (symmetric) {
    sectors.push_back(make_sector(+1));
    sectors.push_back(make_sector(-1));
  } else {
    sectors.push_back(make_sector(0));
  }
  {
    const auto count = std::min<std::size_t>(grid.total_points(), 4 * static_cast<std::size_t>(cfg.n_states) + 8);
    const ProductFunctions pf(grid, hs.potential(), symmetric, symmetric ? 2 * count : count);
    for (auto& s : sectors) solver.prepare(s, pf);
  }

  const auto n = static_cast<std::size_t>(cfg.n_states);
  int found = 0;
  while (true) {
    std::vector<double> all;
    for (const auto& s : sectors) all.insert(all.end(), s.energies.begin(), s.energies.end());
    Sector* pick = nullptr;
    double cutoff = std::numeric_limits<double>::infinity();
    if (all.size() >= n) cutoff = nth_lowest(all, n);
    for (auto& s : sectors) {
      if (s.exhausted) continue;
      const double last = s.energies.empty() ? -std::numeric_limits<double>::infinity() : s.energies.back();
      if (last >= cutoff) continue;
      if (pick == nullptr || last < (pick->energies.empty() ? -std::numeric_limits<double>::infinity()
                                                             : pick->energies.back())) {
        pick = &s;
      }
    }
    if (pick == nullptr) break;
    if (solver.next(*pick, found)) ++found;
  }

  struct Entry {
    double energy;
    int parity;
    const Eigen::VectorXd* state;
    int steps;
  };
  std::vector<Entry> entries;
  for (auto& s : sectors) {
    solver.rayleigh_ritz(s);
    for (std::size_t i = 0; i < s.states.size(); ++i) entries.push_back({s.energies[i], s.parity, &s.states[i], s.steps[i]});
  }
  if (entries.size() < n) throw ConvergenceError("fewer trial functions than requested states", 0.0);
  std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.energy < b.energy; });

  RelaxedStates out;
  out.exchange_symmetric = symmetric;
  for (std::size_t i = 0; i < n; ++i) {
    out.energies.push_back(entries[i].energy);
    out.states.push_back(*entries[i].state);
    out.steps.push_back(entries[i].steps);
    out.exchange_parity.push_back(entries[i].parity);
  }
  const double root_dv = std::sqrt(grid.volume_element());
  for (std::size_t i = 0; i < n; ++i) {
    const double amp = boundary_amplitude(grid, (out.states[i] / root_dv).eval());
    if (amp > 1e-6) {
      throw BoundaryLeakError("state " + std::to_string(i) + " has edge amplitude " + std::to_string(amp) + " > 1e-06",
                              amp);
    }
  }
  return out;
}

Eigen::MatrixXd transition_dipoles(std::span<const Wavefunction> states, const Eigen::VectorXd& dipole) {
  const auto n = static_cast<Eigen::Index>(states.size());
  Eigen::MatrixXd mu(n, n);
  std::vector<Wavefunction> applied;
  applied.reserve(states.size());
  for (const auto& s : states) {
    if (!(s.grid() == states.front().grid())) throw ShapeError("states are on different grids");
    applied.push_back(apply_diagonal(s, dipole));
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      const complex c = inner_product(states[static_cast<std::size_t>(i)], applied[static_cast<std::size_t>(j)]);
      if (std::abs(c.imag()) > 1e-10) {
        throw Error(ErrorKind::Numerical, "transition dipole <" + std::to_string(i) + "|mu|" + std::to_string(j) +
                                              "> has imaginary part " + text::format_double(c.imag()));
      }
      mu(i, j) = mu(j, i) = c.real();
    }
  }
  return mu;
}

double reference_frequency(const SurfaceSet& s, std::span<const double> energies) {
  const double wc = s.omega_c();
  if (s.variant != SurfaceVariant::FieldFree && wc > 0.0) return wc;
  if (energies.size() < 2) throw PartitionError("need at least two states to infer omega_ref");
  return energies[1] - energies[0];
}

std::vector<int> order_degenerate_states(EigenSolution& sol, double tol) {
  const std::size_t n = sol.energies.size();
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  if (n == 0 || sol.dipoles.rows() != static_cast<Eigen::Index>(n)) return order;
  std::size_t i = 1;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && sol.energies[j] - sol.energies[j - 1] < tol) ++j;
    std::stable_sort(order.begin() + static_cast<std::ptrdiff_t>(i), order.begin() + static_cast<std::ptrdiff_t>(j),
                     [&](int a, int b) { return std::abs(sol.dipoles(0, a)) > std::abs(sol.dipoles(0, b)); });
    i = j;
  }
  std::vector<double> e(n);
  Eigen::MatrixXd mu(sol.dipoles.rows(), sol.dipoles.cols());
  for (std::size_t a = 0; a < n; ++a) {
    e[a] = sol.energies[static_cast<std::size_t>(order[a])];
    for (std::size_t b = 0; b < n; ++b) {
      mu(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = sol.dipoles(order[a], order[b]);
    }
  }
  sol.energies = std::move(e);
  sol.dipoles = std::move(mu);
  if (sol.states.size() == n) {
    std::vector<Wavefunction> st;
    st.reserve(n);
    for (int k : order) st.push_back(sol.states[static_cast<std::size_t>(k)]);
    sol.states = std::move(st);
  }
  return order;
}

EigenSolution relax_eigenstates(const SurfaceSet& s, const RelaxationConfig& cfg) {
  validate(cfg);
  const Hamiltonian h(s.grid, s.potential);
  RelaxedStates rs = relax_lowest(h, cfg);

  EigenSolution sol;
  sol.grid = s.grid;
  sol.metadata = s.metadata;
  sol.metadata["variant"] = to_string(s.variant);
  sol.energies = rs.energies;
  const double root_dv = std::sqrt(s.grid.volume_element());
  for (auto& v : rs.states) {
    sol.states.emplace_back(s.grid, (v / root_dv).cast<complex>().eval());
  }
  sol.dipoles = transition_dipoles(sol.states, s.dipole);
  order_degenerate_states(sol);
  sol.partition = partition_manifolds(sol.energies, reference_frequency(s, sol.energies));
  sol.warnings = partition_warnings(sol.partition, sol.energies);
  std::ostringstream steps;
  for (std::size_t i = 0; i < rs.steps.size(); ++i) steps << (i ? "," : "") << rs.steps[i];
  sol.metadata["relax_steps"] = steps.str();
  sol.metadata["exchange_sectors"] = rs.exchange_symmetric ? "yes" : "no";
  return sol;
}

}  // namespace poldqc
