#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "doctest.h"
#include "poldqc/config.hpp"
#include "poldqc/errors.hpp"
#include "poldqc/pipeline.hpp"

using namespace poldqc;

namespace {

const char* kMinimal =
    "[molecule]\n"
    "omega1_cm = 4281\n"
    "omega2_cm = 4108\n"
    "\n"
    "[cavity]\n"
    "lambda0_au = 0.03 # coupling\n"
    "n_mol = 1\n";

RunConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

std::size_t parse_error_line(const std::string& text) {
  try {
    parse(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

}  // namespace

TEST_CASE("minimal configuration takes defaults") {
  const RunConfig c = parse(kMinimal);
  CHECK(c.molecule.omega1_cm == 4281.0);
  CHECK(c.omega_c_cm() == 4281.0);
  CHECK(c.cavity.lambda0_au == 0.03);
  CHECK(c.molecule.dipole_slope_au == kCalibratedDipoleSlope);
  CHECK(c.variant == SurfaceVariant::Full);
  CHECK(c.product_grid().total_points() == 128u * 64u);
}

TEST_CASE("configuration round trips through its canonical text") {
  RunConfig c = parse(kMinimal);
  c.cavity.n_mol = 2;
  c.cavity.omega_c_cm = 4250.0;
  c.variant = SurfaceVariant::ETC;
  c.solver.n_states = 12;
  c.spectrum.gamma_cm = 7.5;
  std::ostringstream a;
  write_config(a, c);
  std::ostringstream b;
  write_config(b, parse(a.str()));
  CHECK(a.str() == b.str());
}

TEST_CASE("parse errors carry the offending line") {
  CHECK(parse_error_line(std::string(kMinimal) + "bogus_key = 1\n") == 8);
  CHECK(parse_error_line(std::string(kMinimal) + "[nowhere]\n") == 8);
  CHECK(parse_error_line(std::string(kMinimal) + "n_mol = 2\n") == 8);
  CHECK(parse_error_line(std::string(kMinimal) + "lambda0_cm = 1\n") == 8);
  CHECK(parse_error_line(std::string(kMinimal) + "just text\n") == 8);
  CHECK(parse_error_line("[molecule]\nomega1_cm = fast\n") == 2);
  CHECK_THROWS_AS(parse("[molecule]\nomega1_cm = 4281\n"), ParseError);
}

TEST_CASE("values outside the model domain are validation errors") {
  CHECK_THROWS_AS(parse("[molecule]\nomega1_cm = 4000\nomega2_cm = 4100\n[cavity]\nlambda0_au = 0.03\nn_mol = 1\n"),
                  AnharmonicityError);
  CHECK_THROWS_AS(parse(std::string(kMinimal) + "[grid]\nr_points = 1\n"), ValidationError);
  CHECK_THROWS_AS(parse(std::string(kMinimal) + "[spectrum]\ngamma_cm = -1\n"), ValidationError);
}

TEST_CASE("presets") {
  RunConfig c = parse(kMinimal);
  c.cavity.n_mol = 2;
  apply_preset(c, "desk");
  CHECK(c.grid.r_points == 96);
  CHECK(c.grid.qc_points == 48);
  apply_preset(c, "paper");
  CHECK(c.grid.r_points == 128);
  CHECK_THROWS_AS(apply_preset(c, "huge"), ValidationError);
}

TEST_CASE("exit codes follow the error category") {
  CHECK(exit_code_for(ParseError(3, "x")) == 2);
  CHECK(exit_code_for(ValidationError("x")) == 3);
  CHECK(exit_code_for(ConvergenceError("x", 1.0)) == 4);
  CHECK(exit_code_for(BoundaryLeakError("x", 1.0)) == 5);
  CHECK(exit_code_for(std::runtime_error("x")) == 1);
  CHECK(parse_command("spectrum") == Command::Spectrum);
  CHECK_THROWS_AS(parse_command("plot"), ValidationError);
}

TEST_CASE("pipeline failures are reported with a manifest") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / ("poldqc_unit_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  {
    std::ofstream(dir / "bad.ini") << kMinimal << "oops\n";
  }
  PipelineRequest r;
  r.command = Command::Surface;
  r.config_path = (dir / "bad.ini").string();
  r.out = (dir / "out.surf").string();
  PipelineResult res = run_pipeline(r);
  CHECK(res.exit_code == 2);
  CHECK(fs::exists(manifest_path(r.out)));

  r.config_path.reset();
  res = run_pipeline(r);
  CHECK(res.exit_code == 3);

  r.command = Command::Solve;
  {
    std::ofstream(dir / "ok.ini") << kMinimal;
  }
  r.config_path = (dir / "ok.ini").string();
  res = run_pipeline(r);
  CHECK(res.exit_code == 3);
  CHECK(res.message.find("--in") != std::string::npos);
  fs::remove_all(dir);
}
