#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace poldqc {

/// Coarse error category; the command-line tool maps each to an exit status.
enum class ErrorKind { Parse, Validation, Convergence, Numerical };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ShapeError : public Error {
 public:
  explicit ShapeError(const std::string& what) : Error(ErrorKind::Numerical, "shape error: " + what) {}
};

class DegenerateInputError : public Error {
 public:
  explicit DegenerateInputError(const std::string& what)
      : Error(ErrorKind::Numerical, "degenerate input: " + what) {}
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what)
      : Error(ErrorKind::Validation, "validation error: " + what) {}
};

class AnharmonicityError : public Error {
 public:
  explicit AnharmonicityError(const std::string& what)
      : Error(ErrorKind::Validation, "anharmonicity error: " + what) {}
};

/// Text input that does not follow a documented format. `line` is 1-based, 0 if unknown.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(ErrorKind::Parse, line > 0 ? "parse error at line " + std::to_string(line) + ": " + what
                                         : "parse error: " + what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// An iterative procedure ran out of iterations. Carries the last residual
/// (or energy change) so callers can judge how far off it was.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double last_residual)
      : Error(ErrorKind::Convergence, "non-convergence: " + what), last_residual_(last_residual) {}
  double last_residual() const noexcept { return last_residual_; }

 private:
  double last_residual_;
};

class BoundaryLeakError : public Error {
 public:
  BoundaryLeakError(const std::string& what, double amplitude)
      : Error(ErrorKind::Numerical, "boundary leak: " + what), amplitude_(amplitude) {}
  double amplitude() const noexcept { return amplitude_; }

 private:
  double amplitude_;
};

class PartitionError : public Error {
 public:
  explicit PartitionError(const std::string& what) : Error(ErrorKind::Numerical, "partition error: " + what) {}
};

class CalibrationError : public Error {
 public:
  explicit CalibrationError(const std::string& what)
      : Error(ErrorKind::Numerical, "calibration error: " + what) {}
};

}  // namespace poldqc
