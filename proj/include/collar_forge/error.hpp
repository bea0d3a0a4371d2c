#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace collar_forge {

enum class ErrorKind {
  InvalidArgument,
  DimensionMismatch,
  DegenerateRegion,
  NotACover,
  ShrunkenCoverFailure,
  OutsideBase,
  OutsideImage,
  NumericFailure,
  ValidationFailure,
  Inconsistent,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid argument";
    case ErrorKind::DimensionMismatch: return "dimension mismatch";
    case ErrorKind::DegenerateRegion: return "degenerate region";
    case ErrorKind::NotACover: return "not a cover";
    case ErrorKind::ShrunkenCoverFailure: return "shrunken cover fails to cover";
    case ErrorKind::OutsideBase: return "outside base";
    case ErrorKind::OutsideImage: return "outside image";
    case ErrorKind::NumericFailure: return "numeric failure";
    case ErrorKind::ValidationFailure: return "validation failure";
    case ErrorKind::Inconsistent: return "inconsistent";
  }
  return "unknown";
}

/// Base exception for every failure raised by the library.
///
/// `witnesses` carries the coordinates of the points that triggered the
/// failure, flattened one point per entry, so callers can reproduce it.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what,
        std::vector<std::vector<double>> witnesses = {})
      : std::runtime_error(std::string(to_string(kind)) + ": " + what),
        kind_(kind),
        witnesses_(std::move(witnesses)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::vector<std::vector<double>>& witnesses() const noexcept { return witnesses_; }

 private:
  ErrorKind kind_;
  std::vector<std::vector<double>> witnesses_;
};

/// Raised by the validation sweeps; names the check that failed.
class ValidationError : public Error {
 public:
  ValidationError(std::string check, const std::string& detail,
                  std::vector<std::vector<double>> witnesses = {})
      : Error(ErrorKind::ValidationFailure, check + ": " + detail, std::move(witnesses)),
        check_(std::move(check)) {}

  const std::string& check() const noexcept { return check_; }

 private:
  std::string check_;
};

}  // namespace collar_forge
