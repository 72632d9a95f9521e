#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "poldqc/errors.hpp"
#include "poldqc/pipeline.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Double-quantum-coherence 2D-IR spectra of vibrational polaritons"};
  app.set_version_flag("--version", std::string(poldqc::kToolVersion));

  std::string command;
  std::string config;
  std::string variant;
  std::string out;
  std::string preset;
  std::string channels;
  std::vector<std::string> inputs;
  double threshold = 0.1;
  double target = 60.0;
  bool quiet = false;

  app.add_option("command", command, "calibrate | surface | solve | decompose | spectrum | diff | peaks")
      ->required()
      ->check(CLI::IsMember({"calibrate", "surface", "solve", "decompose", "spectrum", "diff", "peaks"}));
  app.add_option("--config", config, "run configuration file");
  app.add_option("--variant", variant, "surface variant")->check(CLI::IsMember({"full", "linear", "etc", "free"}));
  app.add_option("--out", out, "output path")->required();
  app.add_option("--preset", preset, "grid preset")->check(CLI::IsMember({"desk", "paper"}));
  app.add_option("--channels", channels, "comma-separated spectrum channels: re,im,abs");
  app.add_option("--threshold", threshold, "peak threshold as a fraction of the maximum")->check(CLI::Range(0.0, 1.0));
  app.add_option("--target-cm", target, "calibration target for the first Rabi splitting (cm^-1)");
  app.add_option("--in", inputs, "input file (repeat for diff)");
  app.add_flag("--quiet", quiet, "suppress progress output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  poldqc::PipelineRequest req;
  try {
    req.command = poldqc::parse_command(command);
    if (!variant.empty()) req.variant = poldqc::parse_variant(variant);
  } catch (const std::exception& e) {
    std::cerr << "poldqc: " << e.what() << '\n';
    return poldqc::exit_code_for(e);
  }
  if (!config.empty()) req.config_path = config;
  if (!preset.empty()) req.preset = preset;
  req.out = out;
  req.inputs = inputs;
  req.threshold = threshold;
  req.target_rabi_cm = target;
  if (!channels.empty()) {
    std::string item;
    for (char ch : channels + ",") {
      if (ch == ',') {
        if (!item.empty()) req.channels.push_back(item);
        item.clear();
      } else {
        item.push_back(ch);
      }
    }
  }
  if (!quiet) req.log = [](const std::string& m) { std::cerr << "poldqc: " << m << '\n'; };

  const poldqc::PipelineResult r = poldqc::run_pipeline(req);
  if (r.exit_code != 0) {
    std::cerr << "poldqc: error: " << r.message << '\n';
  } else if (!quiet) {
    for (const auto& o : r.outputs) std::cerr << "poldqc: wrote " << o << '\n';
  }
  return r.exit_code;
}
