#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace shallowlab {

enum class ErrorKind {
  malformed_ssf,
  unknown_label,
  out_of_range,
  invalid_encoding,
  invalid_token,
  length_mismatch,
  empty_training_set,
  non_finite_objective,
  version_mismatch,
  corrupt_model,
  token_mismatch,
  missing_annotation,
  insufficient_raters,
  degenerate_case,
  malformed_input,
  invalid_argument,
  io,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::malformed_ssf: return "MalformedSSF";
    case ErrorKind::unknown_label: return "UnknownLabel";
    case ErrorKind::out_of_range: return "OutOfRange";
    case ErrorKind::invalid_encoding: return "InvalidEncoding";
    case ErrorKind::invalid_token: return "InvalidToken";
    case ErrorKind::length_mismatch: return "LengthMismatch";
    case ErrorKind::empty_training_set: return "EmptyTrainingSet";
    case ErrorKind::non_finite_objective: return "NonFiniteObjective";
    case ErrorKind::version_mismatch: return "VersionMismatch";
    case ErrorKind::corrupt_model: return "CorruptModel";
    case ErrorKind::token_mismatch: return "TokenMismatch";
    case ErrorKind::missing_annotation: return "MissingAnnotation";
    case ErrorKind::insufficient_raters: return "InsufficientRaters";
    case ErrorKind::degenerate_case: return "DegenerateCase";
    case ErrorKind::malformed_input: return "MalformedInput";
    case ErrorKind::invalid_argument: return "InvalidArgument";
    case ErrorKind::io: return "IOError";
  }
  return "Error";
}

/// Position inside a text input. Lines and columns are 1-based; column counts
/// code points. A zero line means "no location".
struct SourceLocation {
  std::size_t line = 0;
  std::size_t column = 0;
};

/// The single exception type thrown by the library. Callers dispatch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, SourceLocation where = {})
      : std::runtime_error(format(kind, message, where)),
        kind_(kind),
        where_(where),
        detail_(message) {}

  ErrorKind kind() const noexcept { return kind_; }
  const SourceLocation& where() const noexcept { return where_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  static std::string format(ErrorKind kind, const std::string& message,
                            SourceLocation where) {
    std::string out(to_string(kind));
    if (where.line != 0) {
      out += " at line " + std::to_string(where.line) + ", column " +
             std::to_string(where.column);
    }
    out += ": ";
    out += message;
    return out;
  }

  ErrorKind kind_;
  SourceLocation where_;
  std::string detail_;
};

}  // namespace shallowlab
