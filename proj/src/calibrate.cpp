#include "poldqc/calibrate.hpp"

#include <cmath>
#include <cstdint>
#include <utility>

#include <boost/math/tools/toms748_solve.hpp>

#include "poldqc/errors.hpp"
#include "poldqc/units.hpp"

namespace poldqc {

ProductGrid default_single_molecule_grid(double mass) {
  return ProductGrid({make_axis("r1", 128, 0.9, 3.6, mass), make_axis("qc", 64, -45.0, 45.0, 1.0)});
}

namespace {

DipoleModel with_slope(const DipoleModel& tmpl, double slope) {
  DipoleModel d = tmpl;
  d.form = DipoleForm::Linear;
  d.slope = slope;
  return tmpl.form == DipoleForm::Mecke ? mecke_from_linear(d) : d;
}

}  // namespace

double first_rabi_splitting_cm(const CavityMode& cav, const MorseParams& morse, const DipoleModel& dip,
                               const CalibrationOptions& opt) {
  const ProductGrid grid = opt.grid.rank() == 0 ? default_single_molecule_grid(morse.mass) : opt.grid;
  const SurfaceSet s = build_surface_set(grid, morse, dip, cav, opt.variant);
  RelaxationConfig cfg = opt.relax;
  cfg.n_states = std::max(cfg.n_states, 3);
  const RelaxedStates rs = relax_lowest(Hamiltonian(s.grid, s.potential), cfg);
  return (rs.energies[2] - rs.energies[1]) * units::hartree_to_cm;
}

double first_order_rabi(const CavityMode& cav, const MorseParams& morse, double slope) {
  const double mu01 = slope / std::sqrt(2.0 * morse.mass * cav.omega_c);
  return 2.0 * cav.lambda_c() * std::sqrt(cav.omega_c / 2.0) * mu01;
}

DipoleModel calibrate_dipole_slope(double target_rabi_cm, const CavityMode& cav, const MorseParams& morse,
                                   const DipoleModel& tmpl, const CalibrationOptions& opt) {
  if (!(target_rabi_cm > 0.0)) throw ValidationError("target Rabi splitting must be positive");
  if (cav.n_mol != 1) throw ValidationError("calibration runs on a single molecule");
  validate(cav);
  validate(morse);
  if (cav.lambda0 == 0.0) throw CalibrationError("lambda0 = 0 cannot produce a Rabi splitting");
  const double per_unit = first_order_rabi(cav, morse, 1.0) * units::hartree_to_cm;
  const double seed = target_rabi_cm / per_unit;

  int evaluations = 0;
  const auto f = [&](double slope) {
    if (++evaluations > opt.max_evaluations) throw CalibrationError("evaluation budget exhausted");
    return first_rabi_splitting_cm(cav, morse, with_slope(tmpl, slope), opt) - target_rabi_cm;
  };

  double lo = 0.85 * seed;
  double hi = 1.25 * seed;
  double flo = f(lo);
  double fhi = f(hi);
  for (int expand = 0; flo * fhi > 0.0; ++expand) {
    if (expand >= 8) throw CalibrationError("could not bracket the target splitting");
    if (flo > 0.0) {
      hi = lo;
      fhi = flo;
      lo *= 0.6;
      flo = f(lo);
    } else {
      lo = hi;
      flo = fhi;
      hi *= 1.6;
      fhi = f(hi);
    }
  }
  const double rel = opt.slope_tolerance;
  const auto tol = [rel](double a, double b) { return std::abs(b - a) <= rel * std::abs(a); };
  std::uintmax_t iters = static_cast<std::uintmax_t>(opt.max_evaluations);
  std::pair<double, double> r;
  try {
    r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, iters);
  } catch (const CalibrationError&) {
    throw;
  } catch (const std::exception& e) {
    throw CalibrationError(e.what());
  }
  return with_slope(tmpl, 0.5 * (r.first + r.second));
}

}  // namespace poldqc
