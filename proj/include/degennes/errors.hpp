#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace degennes {

enum class ErrorKind {
  ConfigInvalid,
  NotConverged,
  TruncationDominated,
  NoBracket,
  StepUnderflow,
  EnergyOutOfRange,
  WindowEmpty,
  ConstraintViolated,
  FitUnstable,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ConfigInvalid: return "ConfigInvalid";
    case ErrorKind::NotConverged: return "NotConverged";
    case ErrorKind::TruncationDominated: return "TruncationDominated";
    case ErrorKind::NoBracket: return "NoBracket";
    case ErrorKind::StepUnderflow: return "StepUnderflow";
    case ErrorKind::EnergyOutOfRange: return "EnergyOutOfRange";
    case ErrorKind::WindowEmpty: return "WindowEmpty";
    case ErrorKind::ConstraintViolated: return "ConstraintViolated";
    case ErrorKind::FitUnstable: return "FitUnstable";
  }
  return "Unknown";
}

/// Every numerical failure in the library is reported through this type; the
/// kind is what callers branch on, the message carries context (offending xi,
/// failed inequality, ...).
class SpectralError : public std::runtime_error {
 public:
  SpectralError(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace degennes
