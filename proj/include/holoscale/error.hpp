// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace holoscale {

enum class ErrorKind {
  SyntaxError,
  UnboundIdentifier,
  NonHolomorphicMapComponent,
  DivisionByZero,
  BranchCutViolation,
  EvaluationError,
  NonFinite,
  DegenerateJacobian,
  DegenerateEigenvectors,
  InsufficientGrid,
  Inconclusive,
  DegenerateGradient,
  SolveFailure,
  NoiseFloor,
  NonConvergentRatio,
  PreconditionFailed,
  EmptyCloud,
  NoInteriorFound,
  ConfigError,
  CorpusMissing,
};

constexpr std::string_view to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::UnboundIdentifier: return "UnboundIdentifier";
    case ErrorKind::NonHolomorphicMapComponent: return "NonHolomorphicMapComponent";
    case ErrorKind::DivisionByZero: return "DivisionByZero";
    case ErrorKind::BranchCutViolation: return "BranchCutViolation";
    case ErrorKind::EvaluationError: return "EvaluationError";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::DegenerateJacobian: return "DegenerateJacobian";
    case ErrorKind::DegenerateEigenvectors: return "DegenerateEigenvectors";
    case ErrorKind::InsufficientGrid: return "InsufficientGrid";
    case ErrorKind::Inconclusive: return "Inconclusive";
    case ErrorKind::DegenerateGradient: return "DegenerateGradient";
    case ErrorKind::SolveFailure: return "SolveFailure";
    case ErrorKind::NoiseFloor: return "NoiseFloor";
    case ErrorKind::NonConvergentRatio: return "NonConvergentRatio";
    case ErrorKind::PreconditionFailed: return "PreconditionFailed";
    case ErrorKind::EmptyCloud: return "EmptyCloud";
    case ErrorKind::NoInteriorFound: return "NoInteriorFound";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::CorpusMissing: return "CorpusMissing";
  }
  return "Unknown";
}

/// Errors in the configuration/input layer map to exit code 2, everything
/// else is a numerical failure (exit code 3).
constexpr bool is_config_error(ErrorKind k) {
  return k == ErrorKind::SyntaxError || k == ErrorKind::UnboundIdentifier ||
         k == ErrorKind::NonHolomorphicMapComponent || k == ErrorKind::ConfigError ||
         k == ErrorKind::CorpusMissing;
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string operation, const std::string& detail)
      : std::runtime_error(std::string(to_string(kind)) + " in " + operation + ": " + detail),
        kind_(kind),
        operation_(std::move(operation)),
        detail_(detail) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& operation() const noexcept { return operation_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string operation_;
  std::string detail_;
};

/// Parse error with source location. Columns are 1-based.
class SyntaxError : public Error {
 public:
  SyntaxError(int line, int col, std::string expected, const std::string& found)
      : Error(ErrorKind::SyntaxError, "parse",
              "line " + std::to_string(line) + ", col " + std::to_string(col) + ": expected " +
                  expected + ", found " + found),
        line_(line),
        col_(col),
        expected_(std::move(expected)) {}

  int line() const noexcept { return line_; }
  int col() const noexcept { return col_; }
  const std::string& expected() const noexcept { return expected_; }

 private:
  int line_;
  int col_;
  std::string expected_;
};

}  // namespace holoscale
