#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace netfuse {

enum class ErrorCode {
  InvalidArgument,
  EmptyInput,
  DuplicateId,
  RosterMismatch,
  AsymmetricMatrix,
  NonFiniteEntry,
  RangeError,
  ParseError,
  IoError,
  HttpError,
  UnknownIssn,
  ZeroAuthors,
  ZeroRow,
  EmptyJournal,
  ZeroVector,
  SampleTooSmall,
  DegenerateSample,
  DegenerateConditioning,
  IsolatedNode,
  EmptyIntersection,
  StageError,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries a code plus a message that
// names the offending entry (id, row/column, file line, ...).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace netfuse
