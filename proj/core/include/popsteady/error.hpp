#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace popsteady {

enum class ErrorKind {
  InvalidArgument,
  NoBracket,
  NoConvergence,
  NotMetzler,
  GridMisaligned,
  ResolventConditionViolated,
  HypothesisViolated,
  NoCrossing,
  NotParallel,
  StrictPositivityFailure,
  DegenerateEnvironment,
  NoOuterSignChange,
  BadOrigin,
  UnsupportedModel,
  InvalidModel,
  ParseError,
  UnboundVariable,
  DomainError,
  ConfigError,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library. The kind is the machine-readable
/// part; the message carries the numbers needed to diagnose it.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind),
        detail_(message) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

/// Parse failure with a 1-based character position.
class ParseError : public Error {
 public:
  ParseError(std::size_t position, std::string expected)
      : Error(ErrorKind::ParseError,
              "at position " + std::to_string(position) + ", expected " + expected),
        position_(position), expected_(std::move(expected)) {}

  std::size_t position() const noexcept { return position_; }
  const std::string& expected() const noexcept { return expected_; }

 private:
  std::size_t position_;
  std::string expected_;
};

}  // namespace popsteady
