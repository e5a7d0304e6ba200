#include "popsteady/error.hpp"

namespace popsteady {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NoBracket: return "NoBracket";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::NotMetzler: return "NotMetzler";
    case ErrorKind::GridMisaligned: return "GridMisaligned";
    case ErrorKind::ResolventConditionViolated: return "ResolventConditionViolated";
    case ErrorKind::HypothesisViolated: return "HypothesisViolated";
    case ErrorKind::NoCrossing: return "NoCrossing";
    case ErrorKind::NotParallel: return "NotParallel";
    case ErrorKind::StrictPositivityFailure: return "StrictPositivityFailure";
    case ErrorKind::DegenerateEnvironment: return "DegenerateEnvironment";
    case ErrorKind::NoOuterSignChange: return "NoOuterSignChange";
    case ErrorKind::BadOrigin: return "BadOrigin";
    case ErrorKind::UnsupportedModel: return "UnsupportedModel";
    case ErrorKind::InvalidModel: return "InvalidModel";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::UnboundVariable: return "UnboundVariable";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace popsteady
