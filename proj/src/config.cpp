#include "poldqc/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <set>

#include "poldqc/errors.hpp"
#include "poldqc/text_format.hpp"

namespace poldqc {

MorseParams RunConfig::morse() const {
  return fit_morse_to_transitions(molecule.omega1_cm, molecule.omega2_cm, molecule.mass_au, molecule.re_bohr);
}

DipoleModel RunConfig::dipole() const {
  DipoleModel d;
  d.form = DipoleForm::Linear;
  d.mu0 = molecule.dipole_mu0_au;
  d.slope = molecule.dipole_slope_au;
  d.re = molecule.re_bohr;
  d.electronic_gap = molecule.electronic_gap_au;
  d.transition_dipole = molecule.transition_dipole_au;
  if (molecule.dipole_form == DipoleForm::Mecke) {
    if (molecule.mecke_charge_au && molecule.mecke_rstar_bohr) {
      d.form = DipoleForm::Mecke;
      d.charge = *molecule.mecke_charge_au;
      d.decay_length = *molecule.mecke_rstar_bohr;
    } else {
      d = mecke_from_linear(d);
    }
  }
  return d;
}

CavityMode RunConfig::cavity_mode() const {
  return CavityMode{units::cm_to_hartree(omega_c_cm()), cavity.lambda0_au, cavity.n_mol};
}

ProductGrid RunConfig::product_grid() const {
  std::vector<Axis> axes;
  for (int m = 0; m < cavity.n_mol; ++m) {
    axes.push_back(make_axis(m == 0 ? "r1" : "r2", static_cast<std::size_t>(grid.r_points), grid.r_min_bohr,
                             grid.r_max_bohr, molecule.mass_au));
  }
  axes.push_back(make_axis("qc", static_cast<std::size_t>(grid.qc_points), grid.qc_min_au, grid.qc_max_au, 1.0));
  return ProductGrid(std::move(axes));
}

namespace {

using Setter = std::function<void(RunConfig&, const std::string&, std::size_t)>;

struct KeyDef {
  std::string section;
  std::string key;
  Setter set;
};

double as_double(const std::string& v, std::size_t ln) { return text::parse_double(v, ln); }
int as_int(const std::string& v, std::size_t ln) {
  const long long x = text::parse_integer(v, ln);
  if (x < -1000000000LL || x > 1000000000LL) throw ParseError(ln, "integer out of range");
  return static_cast<int>(x);
}

const std::vector<KeyDef>& registry() {
  static const std::vector<KeyDef> keys = {
      {"molecule", "omega1_cm", [](RunConfig& c, const std::string& v, std::size_t l) { c.molecule.omega1_cm = as_double(v, l); }},
      {"molecule", "omega2_cm", [](RunConfig& c, const std::string& v, std::size_t l) { c.molecule.omega2_cm = as_double(v, l); }},
      {"molecule", "mass_au", [](RunConfig& c, const std::string& v, std::size_t l) { c.molecule.mass_au = as_double(v, l); }},
      {"molecule", "re_bohr", [](RunConfig& c, const std::string& v, std::size_t l) { c.molecule.re_bohr = as_double(v, l); }},
      {"molecule", "dipole_form",
       [](RunConfig& c, const std::string& v, std::size_t l) {
         if (v == "linear") {
           c.molecule.dipole_form = DipoleForm::Linear;
         } else if (v == "mecke") {
           c.molecule.dipole_form = DipoleForm::Mecke;
         } else {
           throw ParseError(l, "dipole_form must be 'linear' or 'mecke'");
         }
       }},
      {"molecule", "dipole_mu0_au", [](RunConfig& c, const std::string& v, std::size_t l) { c.molecule.dipole_mu0_au = as_double(v, l); }},
      {"molecule", "dipole_slope_au", [](RunConfig& c, const std::string& v, std::size_t l) { c.molecule.dipole_slope_au = as_double(v, l); }},
      {"molecule", "mecke_charge_au", [](RunConfig& c, const std::string& v, std::size_t l) { c.molecule.mecke_charge_au = as_double(v, l); }},
      {"molecule", "mecke_rstar_bohr", [](RunConfig& c, const std::string& v, std::size_t l) { c.molecule.mecke_rstar_bohr = as_double(v, l); }},
      {"molecule", "electronic_gap_au", [](RunConfig& c, const std::string& v, std::size_t l) { c.molecule.electronic_gap_au = as_double(v, l); }},
      {"molecule", "transition_dipole_au", [](RunConfig& c, const std::string& v, std::size_t l) { c.molecule.transition_dipole_au = as_double(v, l); }},
      {"cavity", "omega_c_cm", [](RunConfig& c, const std::string& v, std::size_t l) { c.cavity.omega_c_cm = as_double(v, l); }},
      {"cavity", "lambda0_au", [](RunConfig& c, const std::string& v, std::size_t l) { c.cavity.lambda0_au = as_double(v, l); }},
      {"cavity", "n_mol", [](RunConfig& c, const std::string& v, std::size_t l) { c.cavity.n_mol = as_int(v, l); }},
      {"grid", "r_points", [](RunConfig& c, const std::string& v, std::size_t l) { c.grid.r_points = as_int(v, l); }},
      {"grid", "r_min_bohr", [](RunConfig& c, const std::string& v, std::size_t l) { c.grid.r_min_bohr = as_double(v, l); }},
      {"grid", "r_max_bohr", [](RunConfig& c, const std::string& v, std::size_t l) { c.grid.r_max_bohr = as_double(v, l); }},
      {"grid", "qc_points", [](RunConfig& c, const std::string& v, std::size_t l) { c.grid.qc_points = as_int(v, l); }},
      {"grid", "qc_min_au", [](RunConfig& c, const std::string& v, std::size_t l) { c.grid.qc_min_au = as_double(v, l); }},
      {"grid", "qc_max_au", [](RunConfig& c, const std::string& v, std::size_t l) { c.grid.qc_max_au = as_double(v, l); }},
      {"solver", "n_states", [](RunConfig& c, const std::string& v, std::size_t l) { c.solver.n_states = as_int(v, l); }},
      {"solver", "dt_imag_au", [](RunConfig& c, const std::string& v, std::size_t l) { c.solver.dt_imag = as_double(v, l); }},
      {"solver", "krylov_order", [](RunConfig& c, const std::string& v, std::size_t l) { c.solver.krylov_order = as_int(v, l); }},
      {"solver", "energy_tol_au", [](RunConfig& c, const std::string& v, std::size_t l) { c.solver.energy_tol = as_double(v, l); }},
      {"solver", "max_steps", [](RunConfig& c, const std::string& v, std::size_t l) { c.solver.max_steps = as_int(v, l); }},
      {"solver", "convergence_window", [](RunConfig& c, const std::string& v, std::size_t l) { c.solver.convergence_window = as_int(v, l); }},
      {"spectrum", "gamma_cm", [](RunConfig& c, const std::string& v, std::size_t l) { c.spectrum.gamma_cm = as_double(v, l); }},
      {"spectrum", "omega2_start_cm", [](RunConfig& c, const std::string& v, std::size_t l) { c.spectrum.omega2.start = as_double(v, l); }},
      {"spectrum", "omega2_step_cm", [](RunConfig& c, const std::string& v, std::size_t l) { c.spectrum.omega2.step = as_double(v, l); }},
      {"spectrum", "omega2_points", [](RunConfig& c, const std::string& v, std::size_t l) { c.spectrum.omega2.n = as_int(v, l); }},
      {"spectrum", "omega3_start_cm", [](RunConfig& c, const std::string& v, std::size_t l) { c.spectrum.omega3.start = as_double(v, l); }},
      {"spectrum", "omega3_step_cm", [](RunConfig& c, const std::string& v, std::size_t l) { c.spectrum.omega3.step = as_double(v, l); }},
      {"spectrum", "omega3_points", [](RunConfig& c, const std::string& v, std::size_t l) { c.spectrum.omega3.n = as_int(v, l); }},
      {"run", "variant",
       [](RunConfig& c, const std::string& v, std::size_t l) {
         try {
           c.variant = parse_variant(v);
         } catch (const ValidationError& e) {
           throw ParseError(l, e.what());
         }
       }},
  };
  return keys;
}

const std::set<std::string> kRequired = {"molecule.omega1_cm", "molecule.omega2_cm", "cavity.lambda0_au",
                                         "cavity.n_mol"};

std::string unit_base(const std::string& key) {
  for (const char* suffix : {"_cm", "_au", "_bohr"}) {
    const std::string s(suffix);
    if (key.size() > s.size() && key.compare(key.size() - s.size(), s.size(), s) == 0) {
      return key.substr(0, key.size() - s.size());
    }
  }
  return key;
}

}  // namespace

RunConfig parse_config(std::istream& in) {
  RunConfig cfg;
  text::LineReader reader(in);
  std::string line;
  std::string section;
  std::set<std::string> seen;
  while (reader.next(line)) {
    const std::size_t ln = reader.line_number();
    const auto hash = line.find('#');
    const std::string body = text::trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']') throw ParseError(ln, "malformed section header");
      section = text::trim(body.substr(1, body.size() - 2));
      bool known = false;
      for (const auto& k : registry()) known = known || k.section == section;
      if (!known) throw ParseError(ln, "unknown section [" + section + "]");
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ParseError(ln, "expected 'key = value'");
    const std::string key = text::trim(body.substr(0, eq));
    const std::string value = text::trim(body.substr(eq + 1));
    if (section.empty()) throw ParseError(ln, "key '" + key + "' outside any [section]");
    if (key.empty() || value.empty()) throw ParseError(ln, "expected 'key = value'");
    const KeyDef* def = nullptr;
    const KeyDef* same_base = nullptr;
    for (const auto& k : registry()) {
      if (k.section != section) continue;
      if (k.key == key) def = &k;
      if (unit_base(k.key) == unit_base(key)) same_base = &k;
    }
    if (def == nullptr) {
      if (same_base != nullptr) {
        throw ParseError(ln, "unit suffix mismatch for '" + key + "': expected '" + same_base->key + "'");
      }
      throw ParseError(ln, "unknown key '" + key + "' in [" + section + "]");
    }
    const std::string full = section + "." + key;
    if (!seen.insert(full).second) throw ParseError(ln, "duplicate key '" + key + "'");
    def->set(cfg, value, ln);
  }
  for (const auto& r : kRequired) {
    if (!seen.count(r)) throw ParseError(reader.line_number(), "missing required key '" + r + "'");
  }
  validate(cfg);
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(0, "cannot open config " + path);
  return parse_config(in);
}

void validate(const RunConfig& cfg) {
  const MorseParams m = cfg.morse();
  if (!(cfg.molecule.omega1_cm > 0.0)) throw ValidationError("omega1_cm must be positive");
  const CavityMode cav = cfg.cavity_mode();
  validate(cav);
  validate(cfg.dipole(), cav.omega_c);
  if (cfg.grid.r_points < 16 || cfg.grid.qc_points < 16) throw ValidationError("grid axes need at least 16 points");
  (void)cfg.product_grid();
  if (!(cfg.grid.r_min_bohr > 0.0)) throw ValidationError("r_min_bohr must be positive");
  validate(cfg.solver);
  if (!(cfg.spectrum.gamma_cm > 0.0)) throw ValidationError("gamma_cm must be positive");
  validate(cfg.spectrum.omega2);
  validate(cfg.spectrum.omega3);
  (void)m;
}

void write_config(std::ostream& out, const RunConfig& c) {
  using text::format_double;
  out << "[molecule]\n";
  out << "omega1_cm = " << format_double(c.molecule.omega1_cm) << '\n';
  out << "omega2_cm = " << format_double(c.molecule.omega2_cm) << '\n';
  out << "mass_au = " << format_double(c.molecule.mass_au) << '\n';
  out << "re_bohr = " << format_double(c.molecule.re_bohr) << '\n';
  out << "dipole_form = " << (c.molecule.dipole_form == DipoleForm::Mecke ? "mecke" : "linear") << '\n';
  out << "dipole_mu0_au = " << format_double(c.molecule.dipole_mu0_au) << '\n';
  out << "dipole_slope_au = " << format_double(c.molecule.dipole_slope_au) << '\n';
  if (c.molecule.mecke_charge_au) out << "mecke_charge_au = " << format_double(*c.molecule.mecke_charge_au) << '\n';
  if (c.molecule.mecke_rstar_bohr) out << "mecke_rstar_bohr = " << format_double(*c.molecule.mecke_rstar_bohr) << '\n';
  out << "electronic_gap_au = " << format_double(c.molecule.electronic_gap_au) << '\n';
  out << "transition_dipole_au = " << format_double(c.molecule.transition_dipole_au) << '\n';
  out << "\n[cavity]\n";
  if (c.cavity.omega_c_cm) out << "omega_c_cm = " << format_double(*c.cavity.omega_c_cm) << '\n';
  out << "lambda0_au = " << format_double(c.cavity.lambda0_au) << '\n';
  out << "n_mol = " << c.cavity.n_mol << '\n';
  out << "\n[grid]\n";
  out << "r_points = " << c.grid.r_points << '\n';
  out << "r_min_bohr = " << format_double(c.grid.r_min_bohr) << '\n';
  out << "r_max_bohr = " << format_double(c.grid.r_max_bohr) << '\n';
  out << "qc_points = " << c.grid.qc_points << '\n';
  out << "qc_min_au = " << format_double(c.grid.qc_min_au) << '\n';
  out << "qc_max_au = " << format_double(c.grid.qc_max_au) << '\n';
  out << "\n[solver]\n";
  out << "n_states = " << c.solver.n_states << '\n';
  out << "dt_imag_au = " << format_double(c.solver.dt_imag) << '\n';
  out << "krylov_order = " << c.solver.krylov_order << '\n';
  out << "energy_tol_au = " << format_double(c.solver.energy_tol) << '\n';
  out << "max_steps = " << c.solver.max_steps << '\n';
  out << "convergence_window = " << c.solver.convergence_window << '\n';
  out << "\n[spectrum]\n";
  out << "gamma_cm = " << format_double(c.spectrum.gamma_cm) << '\n';
  out << "omega2_start_cm = " << format_double(c.spectrum.omega2.start) << '\n';
  out << "omega2_step_cm = " << format_double(c.spectrum.omega2.step) << '\n';
  out << "omega2_points = " << c.spectrum.omega2.n << '\n';
  out << "omega3_start_cm = " << format_double(c.spectrum.omega3.start) << '\n';
  out << "omega3_step_cm = " << format_double(c.spectrum.omega3.step) << '\n';
  out << "omega3_points = " << c.spectrum.omega3.n << '\n';
  out << "\n[run]\n";
  out << "variant = " << to_string(c.variant) << '\n';
}

void apply_preset(RunConfig& cfg, const std::string& preset) {
  if (preset == "desk") {
    if (cfg.cavity.n_mol == 2) {
      cfg.grid.r_points = 96;
      cfg.grid.qc_points = 48;
    } else {
      cfg.grid.r_points = 128;
      cfg.grid.qc_points = 64;
    }
  } else if (preset == "paper") {
    cfg.grid.r_points = 128;
    cfg.grid.qc_points = 64;
  } else {
    throw ValidationError("unknown preset '" + preset + "' (expected desk or paper)");
  }
}

}  // namespace poldqc
