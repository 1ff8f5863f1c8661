#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace patrol {

enum class ErrorCode {
  kEmptyGraph,
  kUnknownNode,
  kInvalidSpec,
  kParseError,
  kInvariantViolation,
  kTooManyAgents,
  kIllegalAction,
  kEpisodeFinished,
  kEmptyMonitoredSet,
  kMixedGraphs,
  kDivergedTraining,
  kSchemaMismatch,
  kInvalidArgument,
  kIoError,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries one of the codes above so the
// command-line front end can map it onto an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  // Configuration problems (exit 2) versus problems with input data (exit 3).
  bool is_config_error() const noexcept {
    return code_ == ErrorCode::kInvalidSpec || code_ == ErrorCode::kInvalidArgument ||
           code_ == ErrorCode::kTooManyAgents;
  }

 private:
  ErrorCode code_;
};

}  // namespace patrol
