#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace apcf {

enum class ErrorCode {
  EmptySequence,
  NonPositiveDigit,
  OutOfDomain,
  IndexOutOfRange,
  NotStrictlyIncreasing,
  SpecConstraintViolated,
  ScheduleTooDense,
  ScheduleInfeasible,
  ZeroMeasure,
  RadiusOutOfRange,
  ParameterOutOfRange,
  NoCertificate,
  StageBoundViolated,
  ParseError,
  NonIntegerValue,
  ValidationError,
  HorizonExceeded,
};

std::string_view to_string(ErrorCode code) noexcept;

// Base for every domain failure raised by the library.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t position, std::string expected, std::string found)
      : Error(ErrorCode::ParseError, "at offset " + std::to_string(position) + ": expected " +
                                         expected + ", found '" + found + "'"),
        position_(position),
        expected_(std::move(expected)),
        found_(std::move(found)) {}

  std::size_t position() const noexcept { return position_; }
  const std::string& expected() const noexcept { return expected_; }
  const std::string& found() const noexcept { return found_; }

 private:
  std::size_t position_;
  std::string expected_;
  std::string found_;
};

// Raised by the stage audit; carries the first stage whose factor exceeded one.
class StageBoundViolated : public Error {
 public:
  StageBoundViolated(std::size_t stage, const std::string& what)
      : Error(ErrorCode::StageBoundViolated, what), stage_(stage) {}
  std::size_t stage() const noexcept { return stage_; }

 private:
  std::size_t stage_;
};

inline std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::EmptySequence: return "EmptySequence";
    case ErrorCode::NonPositiveDigit: return "NonPositiveDigit";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::NotStrictlyIncreasing: return "NotStrictlyIncreasing";
    case ErrorCode::SpecConstraintViolated: return "SpecConstraintViolated";
    case ErrorCode::ScheduleTooDense: return "ScheduleTooDense";
    case ErrorCode::ScheduleInfeasible: return "ScheduleInfeasible";
    case ErrorCode::ZeroMeasure: return "ZeroMeasure";
    case ErrorCode::RadiusOutOfRange: return "RadiusOutOfRange";
    case ErrorCode::ParameterOutOfRange: return "ParameterOutOfRange";
    case ErrorCode::NoCertificate: return "NoCertificate";
    case ErrorCode::StageBoundViolated: return "StageBoundViolated";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::NonIntegerValue: return "NonIntegerValue";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::HorizonExceeded: return "HorizonExceeded";
  }
  return "Unknown";
}

}  // namespace apcf
