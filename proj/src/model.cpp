#include "poldqc/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "poldqc/errors.hpp"
#include "poldqc/text_format.hpp"

namespace poldqc {

double MorseParams::harmonic_frequency() const { return range * std::sqrt(2.0 * depth / mass); }

double MorseParams::anharmonicity() const { return range * range / (2.0 * mass); }

int MorseParams::bound_state_count() const {
  return static_cast<int>(std::floor(std::sqrt(2.0 * mass * depth) / range - 0.5));
}

double MorseParams::level(int v) const {
  const double x = v + 0.5;
  return harmonic_frequency() * x - anharmonicity() * x * x;
}

void validate(const MorseParams& p) {
  if (!(p.depth > 0.0 && p.range > 0.0 && p.re > 0.0 && p.mass > 0.0)) {
    throw ValidationError("Morse parameters must be strictly positive");
  }
  if (p.bound_state_count() < 5) throw ValidationError("Morse well supports fewer than 5 bound states");
}

MorseParams fit_morse_to_transitions(double omega1_cm, double omega2_cm, double mass, double re) {
  if (!(omega2_cm > 0.0)) throw AnharmonicityError("transition wavenumbers must be positive");
  const double wexe_cm = (omega1_cm - omega2_cm) / 2.0;
  if (!(wexe_cm > 0.0)) throw AnharmonicityError("omega1 must exceed omega2 for a Morse fit");
  const double we = units::cm_to_hartree(omega1_cm + 2.0 * wexe_cm);
  const double wexe = units::cm_to_hartree(wexe_cm);
  MorseParams p;
  p.depth = we * we / (4.0 * wexe);
  p.range = std::sqrt(2.0 * mass * wexe);
  p.re = re;
  p.mass = mass;
  validate(p);
  return p;
}

double morse_potential(double r, const MorseParams& p) {
  const double y = 1.0 - std::exp(-p.range * (r - p.re));
  return p.depth * y * y;
}

void validate(const DipoleModel& d, double omega_c) {
  if (!(d.transition_dipole >= 0.0)) throw ValidationError("electronic transition dipole must be >= 0");
  if (!(d.electronic_gap > 10.0 * omega_c)) {
    throw ValidationError("electronic gap must exceed 10 omega_c");
  }
  if (d.form == DipoleForm::Mecke && !(d.decay_length > 0.0)) {
    throw ValidationError("Mecke decay length must be positive");
  }
}

double nuclear_dipole(double r, const DipoleModel& m) {
  switch (m.form) {
    case DipoleForm::Linear:
      return m.mu0 + m.slope * (r - m.re);
    case DipoleForm::Mecke:
      return m.charge * r * std::exp(-r / m.decay_length);
  }
  return 0.0;
}

DipoleModel mecke_from_linear(const DipoleModel& linear) {
  // mu(r) = q r exp(-r/r*) gives mu'/mu = 1/r - 1/r* at r = re.
  if (linear.mu0 == 0.0) throw ValidationError("Mecke form cannot represent a vanishing dipole at re");
  const double inv = 1.0 / linear.re - linear.slope / linear.mu0;
  if (!(inv > 0.0)) throw ValidationError("Mecke form needs slope/mu0 < 1/re");
  DipoleModel out = linear;
  out.form = DipoleForm::Mecke;
  out.decay_length = 1.0 / inv;
  out.charge = linear.mu0 * std::exp(linear.re / out.decay_length) / linear.re;
  return out;
}

double CavityMode::lambda_c() const { return lambda0 / std::sqrt(static_cast<double>(n_mol)); }

double CavityMode::mode_volume() const {
  const double l = lambda_c();
  return l == 0.0 ? std::numeric_limits<double>::infinity() : 4.0 * std::numbers::pi / (l * l);
}

void validate(const CavityMode& c) {
  if (!(c.omega_c > 0.0)) throw ValidationError("cavity frequency must be positive");
  if (!(c.lambda0 >= 0.0)) throw ValidationError("lambda0 must be non-negative");
  if (c.n_mol != 1 && c.n_mol != 2) throw ValidationError("n_mol must be 1 or 2");
}

std::string to_string(SurfaceVariant v) {
  switch (v) {
    case SurfaceVariant::FieldFree:
      return "free";
    case SurfaceVariant::Linear:
      return "linear";
    case SurfaceVariant::Full:
      return "full";
    case SurfaceVariant::ETC:
      return "etc";
  }
  return "full";
}

SurfaceVariant parse_variant(const std::string& text) {
  if (text == "free") return SurfaceVariant::FieldFree;
  if (text == "linear") return SurfaceVariant::Linear;
  if (text == "full") return SurfaceVariant::Full;
  if (text == "etc") return SurfaceVariant::ETC;
  throw ValidationError("unknown variant '" + text + "' (expected full, linear, etc or free)");
}

namespace {

struct MeanField {
  std::vector<double> v_nuc;   // Morse energy per molecule
  std::vector<double> mu_nuc;  // nuclear dipole per molecule
  double omega_c;
  double lambda;
  double qc;
  double gap;
  double d;
  bool dse;

  double molecule_dipole(std::size_t i, double phi) const { return mu_nuc[i] + d * std::sin(phi); }

  double energy(const std::vector<double>& phi) const {
    double e = 0.0;
    double mu_sum = 0.0;
    double onsite = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i) {
      const double x = std::sin(phi[i]);
      e += v_nuc[i] + 0.5 * gap * (1.0 - std::cos(phi[i]));
      mu_sum += mu_nuc[i] + d * x;
      onsite += d * d * (1.0 - x * x);
    }
    e -= omega_c * qc * lambda * mu_sum;
    if (dse) e += 0.5 * lambda * lambda * (mu_sum * mu_sum + onsite);
    return e;
  }

  // Coefficient of d*sigma_x_i in the effective two-level Hamiltonian of molecule i.
  double field(std::size_t i, const std::vector<double>& phi) const {
    double f = -omega_c * qc * lambda;
    if (dse) {
      double others = 0.0;
      for (std::size_t j = 0; j < phi.size(); ++j) {
        if (j != i) others += molecule_dipole(j, phi[j]);
      }
      f += lambda * lambda * (mu_nuc[i] + others);
    }
    return f;
  }
};

}  // namespace

SCFState scf_electronic_ground(std::span<const double> r, double qc, const CavityMode& cav, const MorseParams& morse,
                               const DipoleModel& dip, SurfaceVariant variant, double tol, int max_iter) {
  if (variant == SurfaceVariant::FieldFree) throw ValidationError("SCF requires the full, linear or etc variant");
  if (!(tol > 0.0)) throw ValidationError("SCF tolerance must be positive");
  const std::size_t n = r.size();
  MeanField mf;
  mf.omega_c = cav.omega_c;
  mf.lambda = cav.lambda_c();
  mf.qc = qc;
  mf.gap = dip.electronic_gap;
  mf.d = dip.transition_dipole;
  mf.dse = variant != SurfaceVariant::Linear;
  for (double ri : r) {
    mf.v_nuc.push_back(morse_potential(ri, morse));
    mf.mu_nuc.push_back(nuclear_dipole(ri, dip));
  }

  SCFState state;
  std::vector<double> phi(n, 0.0);

  if (variant == SurfaceVariant::ETC) {
    // Frozen field-free two-level ground state: <sigma_x> = 0, <sigma_x^2> = 1.
    state.mixing_angles = phi;
    state.dipoles = mf.mu_nuc;
    state.energy = mf.energy(phi);
    state.energy_history = {state.energy};
    return state;
  }

  bool damped = false;
  double previous_residual = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= max_iter; ++it) {
    double residual = 0.0;
    // Gauss-Seidel sweep: each molecule is minimized exactly with the others frozen,
    // so the mean-field energy cannot increase.
    for (std::size_t i = 0; i < n; ++i) {
      const double b = mf.d * mf.field(i, phi);
      const double target = std::atan2(-2.0 * b, mf.gap);
      const double before = mf.molecule_dipole(i, phi[i]);
      phi[i] = damped ? phi[i] + 0.5 * (target - phi[i]) : target;
      residual = std::max(residual, std::abs(mf.molecule_dipole(i, phi[i]) - before));
    }
    state.energy_history.push_back(mf.energy(phi));
    state.iterations = it;
    state.residual = residual;
    if (residual < tol) {
      state.mixing_angles = phi;
      for (std::size_t i = 0; i < n; ++i) state.dipoles.push_back(mf.molecule_dipole(i, phi[i]));
      state.energy = state.energy_history.back();
      return state;
    }
    if (residual > previous_residual) damped = true;
    previous_residual = residual;
  }
  throw ConvergenceError("SCF did not reach dipole residual " + text::format_double(tol) + " in " +
                             std::to_string(max_iter) + " iterations",
                         state.residual);
}

double SurfaceSet::omega_c() const {
  const auto it = metadata.find("omega_c_cm");
  if (it == metadata.end()) return 0.0;
  return units::cm_to_hartree(text::parse_double(it->second, 0));
}

SurfaceSet build_surface_set(const ProductGrid& grid, const MorseParams& morse, const DipoleModel& dip,
                             const CavityMode& cav, SurfaceVariant variant) {
  validate(morse);
  validate(cav);
  validate(dip, cav.omega_c);
  const bool photon = grid.has_photon_axis();
  if (!photon && variant != SurfaceVariant::FieldFree) {
    throw ValidationError("surface grid needs a qc axis unless the variant is field-free");
  }
  if (static_cast<int>(grid.n_molecular_axes()) != cav.n_mol) {
    throw ValidationError("grid has " + std::to_string(grid.n_molecular_axes()) + " r axes but n_mol = " +
                          std::to_string(cav.n_mol));
  }

  const std::size_t n_mol = grid.n_molecular_axes();
  const std::size_t total = grid.total_points();
  SurfaceSet s;
  s.grid = grid;
  s.variant = variant;
  s.potential.resize(static_cast<Eigen::Index>(total));
  s.dipole.resize(static_cast<Eigen::Index>(total));

  const double wc = cav.omega_c;
  double field_free_min = std::numeric_limits<double>::infinity();
  std::vector<double> r(n_mol);
  for (std::size_t k = 0; k < total; ++k) {
    const auto idx = grid.unravel(k);
    for (std::size_t a = 0; a < n_mol; ++a) r[a] = grid.axis(a).coordinate(idx[a]);
    const double qc = photon ? grid.axis(n_mol).coordinate(idx[n_mol]) : 0.0;
    const double e_dis = 0.5 * wc * wc * qc * qc;

    double free_energy = e_dis;
    double free_dipole = 0.0;
    for (double ri : r) {
      free_energy += morse_potential(ri, morse);
      free_dipole += nuclear_dipole(ri, dip);
    }
    field_free_min = std::min(field_free_min, free_energy);

    double v = free_energy;
    double mu = free_dipole;
    if (variant != SurfaceVariant::FieldFree) {
      try {
        const SCFState st = scf_electronic_ground(r, qc, cav, morse, dip, variant);
        v = st.energy + e_dis;
        mu = 0.0;
        for (double m : st.dipoles) mu += m;
      } catch (const ConvergenceError& e) {
        throw ConvergenceError(std::string(e.what()) + " at grid point " + std::to_string(k), e.last_residual());
      }
    }
    s.potential[static_cast<Eigen::Index>(k)] = v;
    s.dipole[static_cast<Eigen::Index>(k)] = mu;
  }
  s.potential.array() -= field_free_min;

  using text::format_double;
  Metadata& md = s.metadata;
  md["variant"] = to_string(variant);
  md["n_mol"] = std::to_string(cav.n_mol);
  md["omega_c_cm"] = format_double(units::hartree_to_wavenumber(cav.omega_c));
  md["lambda0"] = format_double(cav.lambda0);
  md["lambda_c"] = format_double(cav.lambda_c());
  md["morse_depth_au"] = format_double(morse.depth);
  md["morse_range_au"] = format_double(morse.range);
  md["re_bohr"] = format_double(morse.re);
  md["mass_au"] = format_double(morse.mass);
  md["dipole_form"] = dip.form == DipoleForm::Linear ? "linear" : "mecke";
  md["dipole_mu0_au"] = format_double(dip.mu0);
  md["dipole_slope_au"] = format_double(dip.slope);
  md["mecke_charge_au"] = format_double(dip.charge);
  md["mecke_rstar_bohr"] = format_double(dip.decay_length);
  md["electronic_gap_au"] = format_double(dip.electronic_gap);
  md["transition_dipole_au"] = format_double(dip.transition_dipole);
  md["energy_offset_au"] = format_double(field_free_min);
  md["provenance"] = "model";
  return s;
}

}  // namespace poldqc
