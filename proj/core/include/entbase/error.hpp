#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace entbase {

enum class ErrorKind {
  InvalidArgument,
  InvalidState,
  NotXForm,
  DegenerateResource,
  ZeroConcurrence,
  DegeneratePhases,
  DimensionMismatch,
  DegenerateGrid,
};

constexpr std::string_view error_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::InvalidState: return "InvalidState";
    case ErrorKind::NotXForm: return "NotXForm";
    case ErrorKind::DegenerateResource: return "DegenerateResource";
    case ErrorKind::ZeroConcurrence: return "ZeroConcurrence";
    case ErrorKind::DegeneratePhases: return "DegeneratePhases";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::DegenerateGrid: return "DegenerateGrid";
  }
  return "Unknown";
}

/// Base exception for every failure raised by the library. The kind is
/// stable and is what the CLI reports; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(error_name(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  std::string_view name() const noexcept { return error_name(kind_); }

 private:
  ErrorKind kind_;
};

/// Raised by extract_xstate; carries the largest entry found outside the
/// main and anti-diagonal.
class NotXFormError : public Error {
 public:
  NotXFormError(double magnitude, int row, int col)
      : Error(ErrorKind::NotXForm, "entry (" + std::to_string(row) + "," + std::to_string(col) +
                                       ") has magnitude " + std::to_string(magnitude)),
        magnitude_(magnitude) {}

  double magnitude() const noexcept { return magnitude_; }

 private:
  double magnitude_;
};

}  // namespace entbase
