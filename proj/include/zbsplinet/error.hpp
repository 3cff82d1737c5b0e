#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace zbsplinet {

enum class ErrorCode {
  NonIncreasingKnots,
  KnotOutsideInterval,
  EmptyInterval,
  IndexOutOfRange,
  PointOutsideDomain,
  DerivOrderTooHigh,
  DegenerateSpace,
  DimensionMismatch,
  KnotMismatch,
  NonDyadicKnots,
  NumericalBreakdown,
  NonpositiveDensity,
  ZeroFrequency,
  OverflowRisk,
  GridMismatch,
  GridTooLarge,
  InvalidParameter,
  SingularSystem,
  InfeasibleDesign,
  TooFewObservations,
  ComponentOutOfRange,
};

constexpr std::string_view error_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonIncreasingKnots: return "NonIncreasingKnots";
    case ErrorCode::KnotOutsideInterval: return "KnotOutsideInterval";
    case ErrorCode::EmptyInterval: return "EmptyInterval";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::PointOutsideDomain: return "PointOutsideDomain";
    case ErrorCode::DerivOrderTooHigh: return "DerivOrderTooHigh";
    case ErrorCode::DegenerateSpace: return "DegenerateSpace";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::KnotMismatch: return "KnotMismatch";
    case ErrorCode::NonDyadicKnots: return "NonDyadicKnots";
    case ErrorCode::NumericalBreakdown: return "NumericalBreakdown";
    case ErrorCode::NonpositiveDensity: return "NonpositiveDensity";
    case ErrorCode::ZeroFrequency: return "ZeroFrequency";
    case ErrorCode::OverflowRisk: return "OverflowRisk";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::GridTooLarge: return "GridTooLarge";
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::InfeasibleDesign: return "InfeasibleDesign";
    case ErrorCode::TooFewObservations: return "TooFewObservations";
    case ErrorCode::ComponentOutOfRange: return "ComponentOutOfRange";
  }
  return "Unknown";
}

/// Every precondition violation in the library is reported as an Error
/// carrying a stable, machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }
  [[nodiscard]] std::string_view name() const noexcept { return error_name(code_); }

 private:
  ErrorCode code_;
};

namespace detail {
[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool ok, ErrorCode code, const std::string& what) {
  if (!ok) fail(code, what);
}
}  // namespace detail

}  // namespace zbsplinet
