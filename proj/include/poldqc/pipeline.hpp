#pragma once

#include <exception>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "poldqc/config.hpp"

namespace poldqc {

inline constexpr const char* kToolVersion = "1.0.0";

enum class Command { Calibrate, Surface, Solve, Decompose, Spectrum, Diff, Peaks };

Command parse_command(const std::string& name);
std::string to_string(Command c);

struct PipelineRequest {
  Command command = Command::Surface;
  std::optional<std::string> config_path;
  std::optional<SurfaceVariant> variant;
  std::string out;
  std::optional<std::string> preset;
  std::vector<std::string> channels;  // re, im, abs
  double threshold = 0.1;
  double target_rabi_cm = 60.0;
  std::vector<std::string> inputs;
  std::function<void(const std::string&)> log;
};

struct StageTiming {
  std::string name;
  double seconds = 0.0;
};

struct PipelineResult {
  int exit_code = 0;
  std::string message;
  std::vector<std::string> outputs;
  std::vector<StageTiming> stages;
};

/// 0 success, 2 parse, 3 validation, 4 non-convergence, 5 numerical, 1 anything else.
int exit_code_for(const std::exception& e);

/// Runs one command, writes its outputs and `<out>.manifest.json`. Errors are
/// caught and reported through the result; the manifest records the failure.
PipelineResult run_pipeline(const PipelineRequest& req);

std::string manifest_path(const std::string& out);

}  // namespace poldqc
