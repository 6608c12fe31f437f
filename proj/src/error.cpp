#include "eiv/error.hpp"

namespace eiv {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Domain: return "DomainError";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::QuadratureFailure: return "QuadratureFailure";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::DegenerateVariance: return "DegenerateVariance";
    case ErrorCode::PerfectCorrelation: return "PerfectCorrelation";
    case ErrorCode::ZeroCovariance: return "ZeroCovariance";
    case ErrorCode::EstimatorUndefined: return "EstimatorUndefined";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::Io: return "IoError";
  }
  return "Unknown";
}

}  // namespace eiv
