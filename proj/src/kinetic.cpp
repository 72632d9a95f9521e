#include "poldqc/kinetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <numbers>

#include <fftw3.h>

#include "poldqc/errors.hpp"

namespace poldqc {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

int& fft_thread_count() {
  static int n = 1;
  return n;
}

void init_fftw_threads_once() {
  static std::once_flag flag;
  std::call_once(flag, [] {
    fftw_init_threads();
    if (const char* env = std::getenv("POLDQC_THREADS")) {
      const int n = std::atoi(env);
      if (n > 0) fft_thread_count() = n;
    }
  });
}

/// Standard unshifted DFT wavenumbers squared for an axis of n points.
std::vector<double> wavenumbers_squared(const Axis& ax, std::size_t count) {
  const double period = static_cast<double>(ax.n_points) * ax.spacing();
  const double dk = 2.0 * std::numbers::pi / period;
  std::vector<double> k2(count);
  for (std::size_t j = 0; j < count; ++j) {
    const long long m = j <= ax.n_points / 2 ? static_cast<long long>(j)
                                             : static_cast<long long>(j) - static_cast<long long>(ax.n_points);
    const double k = dk * static_cast<double>(m);
    k2[j] = k * k;
  }
  return k2;
}

}  // namespace

void set_fft_threads(int n) {
  init_fftw_threads_once();
  if (n > 0) {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fft_thread_count() = n;
  }
}

struct KineticOperator::Impl {
  ProductGrid grid;
  std::size_t n_total = 0;
  std::size_t n_half = 0;
  Eigen::VectorXd factor_full;  // sum_a k_a^2 / (2 m_a) in c2c ordering
  Eigen::VectorXd factor_half;  // same on the r2c half spectrum
  fftw_plan c2c_forward = nullptr;
  fftw_plan c2c_backward = nullptr;
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;

  explicit Impl(const ProductGrid& g) : grid(g) {
    init_fftw_threads_once();
    const std::size_t rank = grid.rank();
    std::vector<int> dims(rank);
    for (std::size_t a = 0; a < rank; ++a) dims[a] = static_cast<int>(grid.axis(a).n_points);
    n_total = grid.total_points();
    const std::size_t last = grid.axis(rank - 1).n_points;
    n_half = n_total / last * (last / 2 + 1);

    factor_full = build_factor(false);
    factor_half = build_factor(true);

    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_plan_with_nthreads(fft_thread_count());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fftw_complex* cbuf = fftw_alloc_complex(n_total);
    double* rbuf = fftw_alloc_real(n_total);
    fftw_complex* hbuf = fftw_alloc_complex(n_half);
    c2c_forward = fftw_plan_dft(static_cast<int>(rank), dims.data(), cbuf, cbuf, FFTW_FORWARD, flags);
    c2c_backward = fftw_plan_dft(static_cast<int>(rank), dims.data(), cbuf, cbuf, FFTW_BACKWARD, flags);
    r2c = fftw_plan_dft_r2c(static_cast<int>(rank), dims.data(), rbuf, hbuf, flags | FFTW_PRESERVE_INPUT);
    c2r = fftw_plan_dft_c2r(static_cast<int>(rank), dims.data(), hbuf, rbuf, flags);
    fftw_free(cbuf);
    fftw_free(rbuf);
    fftw_free(hbuf);
    if (!c2c_forward || !c2c_backward || !r2c || !c2r) throw ShapeError("FFTW could not plan the kinetic transform");
  }

  ~Impl() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    for (fftw_plan p : {c2c_forward, c2c_backward, r2c, c2r}) {
      if (p) fftw_destroy_plan(p);
    }
  }

  Eigen::VectorXd build_factor(bool half) const {
    const std::size_t rank = grid.rank();
    std::vector<std::size_t> counts(rank);
    std::vector<std::vector<double>> per_axis(rank);
    for (std::size_t a = 0; a < rank; ++a) {
      const Axis& ax = grid.axis(a);
      counts[a] = (half && a + 1 == rank) ? ax.n_points / 2 + 1 : ax.n_points;
      per_axis[a] = wavenumbers_squared(ax, counts[a]);
      for (double& v : per_axis[a]) v /= 2.0 * ax.mass;
    }
    std::size_t total = 1;
    for (auto c : counts) total *= c;
    Eigen::VectorXd f(static_cast<Eigen::Index>(total));
    for (std::size_t k = 0; k < total; ++k) {
      std::size_t rem = k;
      double s = 0.0;
      for (std::size_t a = rank; a-- > 0;) {
        s += per_axis[a][rem % counts[a]];
        rem /= counts[a];
      }
      f[static_cast<Eigen::Index>(k)] = s;
    }
    return f;
  }
};

KineticOperator::KineticOperator(const ProductGrid& grid) : impl_(std::make_unique<Impl>(grid)) {}
KineticOperator::~KineticOperator() = default;
KineticOperator::KineticOperator(KineticOperator&&) noexcept = default;
KineticOperator& KineticOperator::operator=(KineticOperator&&) noexcept = default;

const ProductGrid& KineticOperator::grid() const { return impl_->grid; }

double KineticOperator::max_eigenvalue() const { return impl_->factor_full.maxCoeff(); }

Eigen::VectorXcd KineticOperator::apply(const Eigen::VectorXcd& psi) const {
  if (static_cast<std::size_t>(psi.size()) != impl_->n_total) throw ShapeError("kinetic operator size mismatch");
  Eigen::VectorXcd out = psi;
  auto* data = reinterpret_cast<fftw_complex*>(out.data());
  fftw_execute_dft(impl_->c2c_forward, data, data);
  out.array() *= impl_->factor_full.array() / static_cast<double>(impl_->n_total);
  fftw_execute_dft(impl_->c2c_backward, data, data);
  return out;
}

Eigen::VectorXd KineticOperator::apply(const Eigen::VectorXd& psi) const {
  if (static_cast<std::size_t>(psi.size()) != impl_->n_total) throw ShapeError("kinetic operator size mismatch");
  Eigen::VectorXcd half(static_cast<Eigen::Index>(impl_->n_half));
  auto* hdata = reinterpret_cast<fftw_complex*>(half.data());
  fftw_execute_dft_r2c(impl_->r2c, const_cast<double*>(psi.data()), hdata);
  half.array() *= impl_->factor_half.array() / static_cast<double>(impl_->n_total);
  Eigen::VectorXd out(psi.size());
  fftw_execute_dft_c2r(impl_->c2r, hdata, out.data());
  return out;
}

}  // namespace poldqc
