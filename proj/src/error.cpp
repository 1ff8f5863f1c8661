#include "patrol/error.hpp"

namespace patrol {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEmptyGraph: return "EmptyGraph";
    case ErrorCode::kUnknownNode: return "UnknownNode";
    case ErrorCode::kInvalidSpec: return "InvalidSpec";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kInvariantViolation: return "InvariantViolation";
    case ErrorCode::kTooManyAgents: return "TooManyAgents";
    case ErrorCode::kIllegalAction: return "IllegalAction";
    case ErrorCode::kEpisodeFinished: return "EpisodeFinished";
    case ErrorCode::kEmptyMonitoredSet: return "EmptyMonitoredSet";
    case ErrorCode::kMixedGraphs: return "MixedGraphs";
    case ErrorCode::kDivergedTraining: return "DivergedTraining";
    case ErrorCode::kSchemaMismatch: return "SchemaMismatch";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace patrol
