#ifndef GREEDYLAB_ERROR_HPP
#define GREEDYLAB_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace greedylab {

enum class ErrorCode {
  RankDeficient,
  BadDimensions,
  NonFinite,
  ColumnsNotNormalized,
  BudgetExceeded,
  DeltaOutOfRange,
  PreconditionViolated,
  EmptyCandidates,
  ZeroVector,
  TooSmall,
  InvalidArgument,
  Io,
  Parse,
};

std::string_view to_string(ErrorCode code);

/// Base exception for every failure raised by the library. The code lets
/// callers (and the CLI's exit-status mapping) branch without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace greedylab

#endif  // GREEDYLAB_ERROR_HPP
