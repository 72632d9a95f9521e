#include "poldqc/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include "json.hpp"

#include "poldqc/basis.hpp"
#include "poldqc/calibrate.hpp"
#include "poldqc/dqc.hpp"
#include "poldqc/eigen_io.hpp"
#include "poldqc/errors.hpp"
#include "poldqc/kinetic.hpp"
#include "poldqc/spectrum_io.hpp"
#include "poldqc/surface_io.hpp"
#include "poldqc/text_format.hpp"

namespace poldqc {

Command parse_command(const std::string& name) {
  if (name == "calibrate") return Command::Calibrate;
  if (name == "surface") return Command::Surface;
  if (name == "solve") return Command::Solve;
  if (name == "decompose") return Command::Decompose;
  if (name == "spectrum") return Command::Spectrum;
  if (name == "diff") return Command::Diff;
  if (name == "peaks") return Command::Peaks;
  throw ValidationError("unknown command '" + name + "'");
}

std::string to_string(Command c) {
  switch (c) {
    case Command::Calibrate:
      return "calibrate";
    case Command::Surface:
      return "surface";
    case Command::Solve:
      return "solve";
    case Command::Decompose:
      return "decompose";
    case Command::Spectrum:
      return "spectrum";
    case Command::Diff:
      return "diff";
    case Command::Peaks:
      return "peaks";
  }
  return "unknown";
}

int exit_code_for(const std::exception& e) {
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    switch (err->kind()) {
      case ErrorKind::Parse:
        return 2;
      case ErrorKind::Validation:
        return 3;
      case ErrorKind::Convergence:
        return 4;
      case ErrorKind::Numerical:
        return 5;
    }
  }
  return 1;
}

std::string manifest_path(const std::string& out) { return out + ".manifest.json"; }

namespace {

class Runner {
 public:
  explicit Runner(const PipelineRequest& req) : req_(req) {}

  PipelineResult run() {
    PipelineResult result;
    try {
      if (req_.out.empty()) throw ValidationError("--out is required");
      set_fft_threads(0);
      load_config();
      execute();
      result.exit_code = 0;
      result.message = "ok";
    } catch (const std::exception& e) {
      result.exit_code = exit_code_for(e);
      result.message = "[" + to_string(req_.command) + "/" + stage_ + "] " + e.what();
    }
    result.outputs = outputs_;
    result.stages = stages_;
    try {
      write_manifest(result);
    } catch (const std::exception& e) {
      if (result.exit_code == 0) {
        result.exit_code = 1;
        result.message = std::string("manifest: ") + e.what();
      }
    }
    return result;
  }

 private:
  template <class F>
  auto stage(const std::string& name, F&& f) {
    stage_ = name;
    log("stage " + name);
    const auto t0 = std::chrono::steady_clock::now();
    if constexpr (std::is_void_v<decltype(f())>) {
      f();
      stages_.push_back({name, seconds_since(t0)});
    } else {
      auto r = f();
      stages_.push_back({name, seconds_since(t0)});
      return r;
    }
  }

  static double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }

  void log(const std::string& m) const {
    if (req_.log) req_.log(m);
  }

  void load_config() {
    stage_ = "config";
    if (!req_.config_path) return;
    cfg_ = parse_config_file(*req_.config_path);
    if (req_.preset) apply_preset(*cfg_, *req_.preset);
    if (req_.variant) cfg_->variant = *req_.variant;
    cfg_->solver.progress = [this](const std::string& m) { log(m); };
    validate(*cfg_);
  }

  const RunConfig& config() const {
    if (!cfg_) throw ValidationError("command '" + to_string(req_.command) + "' needs --config");
    return *cfg_;
  }

  const std::string& input(std::size_t i) const {
    if (req_.inputs.size() <= i) {
      throw ValidationError("command '" + to_string(req_.command) + "' needs " + std::to_string(i + 1) +
                            " input file(s) via --in");
    }
    return req_.inputs[i];
  }

  void produced(const std::string& path) { outputs_.push_back(path); }

  void execute() {
    switch (req_.command) {
      case Command::Calibrate:
        return calibrate();
      case Command::Surface:
        return surface();
      case Command::Solve:
        return solve();
      case Command::Decompose:
        return decompose_cmd();
      case Command::Spectrum:
        return spectrum();
      case Command::Diff:
        return diff();
      case Command::Peaks:
        return peaks();
    }
  }

  void calibrate() {
    RunConfig c = config();
    const CavityMode cav{units::cm_to_hartree(c.omega_c_cm()), c.cavity.lambda0_au, 1};
    CalibrationOptions opt;
    opt.grid = ProductGrid({make_axis("r1", static_cast<std::size_t>(c.grid.r_points), c.grid.r_min_bohr,
                                      c.grid.r_max_bohr, c.molecule.mass_au),
                            make_axis("qc", static_cast<std::size_t>(c.grid.qc_points), c.grid.qc_min_au,
                                      c.grid.qc_max_au, 1.0)});
    opt.variant = c.variant == SurfaceVariant::FieldFree ? SurfaceVariant::Full : c.variant;
    const DipoleModel d =
        stage("calibrate", [&] { return calibrate_dipole_slope(req_.target_rabi_cm, cav, c.morse(), c.dipole(), opt); });
    if (d.form == DipoleForm::Mecke) {
      c.molecule.mecke_charge_au = d.charge;
      c.molecule.mecke_rstar_bohr = d.decay_length;
      c.molecule.dipole_slope_au = d.charge * std::exp(-c.molecule.re_bohr / d.decay_length) *
                                   (1.0 - c.molecule.re_bohr / d.decay_length);
    } else {
      c.molecule.dipole_slope_au = d.slope;
    }
    stage("write", [&] {
      std::ofstream out(req_.out, std::ios::binary);
      if (!out) throw ParseError(0, "cannot write " + req_.out);
      write_config(out, c);
    });
    produced(req_.out);
  }

  void surface() {
    const RunConfig& c = config();
    const SurfaceSet s = stage("surface", [&] {
      return build_surface_set(c.product_grid(), c.morse(), c.dipole(), c.cavity_mode(), c.variant);
    });
    stage("write", [&] { save_surface_set(s, req_.out); });
    produced(req_.out);
  }

  void solve() {
    const RunConfig& c = config();
    const SurfaceSet s = stage("load", [&] { return load_surface_set(input(0)); });
    const EigenSolution sol = stage("relax", [&] { return relax_eigenstates(s, c.solver); });
    for (const auto& w : sol.warnings) log("warning: " + w);
    stage("write", [&] { save_eigen_solution(sol, req_.out, true); });
    produced(req_.out);
    produced(wavefunction_sidecar_path(req_.out));
  }

  void decompose_cmd() {
    const RunConfig& c = config();
    const EigenSolution sol = stage("load", [&] { return load_eigen_solution(input(0)); });
    if (sol.states.empty()) throw ValidationError("eigen file has no wavefunction sidecar");
    double wc = units::cm_to_hartree(c.omega_c_cm());
    if (const auto it = sol.metadata.find("omega_c_cm"); it != sol.metadata.end()) {
      wc = units::cm_to_hartree(text::parse_double(it->second, 0));
    }
    const auto basis = stage("basis", [&] {
      BareBasisOptions opt;
      opt.relax = c.solver;
      opt.relax.progress = nullptr;
      return build_bare_basis(sol.grid, c.morse(), wc, opt);
    });
    const DecompositionTable t = stage("decompose", [&] { return decompose(sol, basis); });
    for (const auto& n : t.notes) log("note: " + n);
    stage("write", [&] {
      std::ofstream out(req_.out, std::ios::binary);
      if (!out) throw ParseError(0, "cannot write " + req_.out);
      write_decomposition_csv(out, t);
    });
    produced(req_.out);
  }

  SpectrumGrid spectrum_from(const std::string& path, std::optional<EigenSolution>* eigen = nullptr) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(0, "cannot open " + path);
    std::string first;
    std::getline(in, first);
    if (first.rfind("#POLDQC-SPECTRUM", 0) == 0) return load_spectrum(path);
    if (first.rfind("#POLDQC-EIGEN", 0) == 0) {
      const RunConfig& c = config();
      std::ifstream ein(path, std::ios::binary);
      EigenSolution sol = read_eigen_solution(ein);
      SpectrumGrid s = compute_dqc(sol, c.spectrum.gamma_cm, c.spectrum.omega2, c.spectrum.omega3);
      if (eigen != nullptr) *eigen = std::move(sol);
      return s;
    }
    throw ParseError(1, path + " is neither an eigen nor a spectrum file");
  }

  void spectrum() {
    const RunConfig& c = config();
    const EigenSolution sol = stage("load", [&] {
      std::ifstream in(input(0), std::ios::binary);
      if (!in) throw ParseError(0, "cannot open " + input(0));
      return read_eigen_solution(in);
    });
    const SpectrumGrid s = stage("dqc", [&] {
      return compute_dqc(sol, c.spectrum.gamma_cm, c.spectrum.omega2, c.spectrum.omega3);
    });
    stage("write", [&] {
      save_spectrum(s, req_.out);
      produced(req_.out);
      if (!req_.channels.empty()) {
        const SpectrumChannels ch = spectrum_channels(s);
        for (const auto& name : req_.channels) {
          RealMap m{s.omega2, s.omega3, name, {}};
          if (name == "re") {
            m.values = ch.re;
          } else if (name == "im") {
            m.values = ch.im;
          } else if (name == "abs") {
            m.values = ch.abs;
          } else {
            throw ValidationError("unknown channel '" + name + "' (expected re, im or abs)");
          }
          const std::string path = req_.out + "." + name;
          save_map(m, path);
          produced(path);
        }
      }
    });
  }

  void diff() {
    const SpectrumGrid a = stage("load", [&] { return spectrum_from(input(0)); });
    const SpectrumGrid b = stage("load", [&] { return spectrum_from(input(1)); });
    const RealMap m = stage("difference", [&] { return RealMap{a.omega2, a.omega3, "difference", difference_spectrum(a, b)}; });
    stage("write", [&] { save_map(m, req_.out); });
    produced(req_.out);
  }

  void peaks() {
    std::optional<EigenSolution> eig;
    const SpectrumGrid s = stage("load", [&] {
      SpectrumGrid grid = spectrum_from(input(0), &eig);
      if (!eig && req_.inputs.size() > 1) {
        std::ifstream in(input(1), std::ios::binary);
        if (!in) throw ParseError(0, "cannot open " + input(1));
        eig = read_eigen_solution(in);
      }
      return grid;
    });
    const auto p = stage("peaks", [&] { return find_peaks(s, req_.threshold, eig ? &*eig : nullptr); });
    stage("write", [&] {
      std::ofstream out(req_.out, std::ios::binary);
      if (!out) throw ParseError(0, "cannot write " + req_.out);
      write_peaks(out, p);
    });
    produced(req_.out);
  }

  void write_manifest(const PipelineResult& result) const {
    using nlohmann::json;
    json j;
    j["tool"] = "poldqc";
    j["version"] = kToolVersion;
    j["command"] = to_string(req_.command);
    j["exit_code"] = result.exit_code;
    j["message"] = result.message;
    if (req_.config_path) j["config_path"] = *req_.config_path;
    if (cfg_) {
      std::ostringstream echo;
      write_config(echo, *cfg_);
      j["config"] = echo.str();
    }
    if (req_.preset) j["preset"] = *req_.preset;
    json ins = json::array();
    for (const auto& p : req_.inputs) {
      ins.push_back({{"path", p}, {"sha256", std::filesystem::exists(p) ? text::sha256_file(p) : ""}});
    }
    j["inputs"] = ins;
    json outs = json::array();
    for (const auto& p : result.outputs) outs.push_back({{"path", p}, {"sha256", text::sha256_file(p)}});
    j["outputs"] = outs;
    json st = json::array();
    for (const auto& s : result.stages) st.push_back({{"stage", s.name}, {"seconds", s.seconds}});
    j["stages"] = st;
    std::ofstream out(manifest_path(req_.out), std::ios::binary);
    if (!out) throw ParseError(0, "cannot write manifest");
    out << j.dump(2) << '\n';
  }

  const PipelineRequest& req_;
  std::optional<RunConfig> cfg_;
  std::string stage_ = "setup";
  std::vector<std::string> outputs_;
  std::vector<StageTiming> stages_;
};

}  // namespace

PipelineResult run_pipeline(const PipelineRequest& req) { return Runner(req).run(); }

}  // namespace poldqc
