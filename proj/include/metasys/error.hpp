#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace metasys {

enum class ErrorCode {
  DimensionMismatch,
  StateDomainViolation,
  UpdateDomainViolation,
  TooFewEntities,
  OutOfRange,
  BadCharacter,
  BadDimensions,
  NonFiniteInput,
  EmptyInput,
  UnsupportedKind,
  ParseError,
  SemanticError,
  NoBackendConfigured,
  CompileFailed,
  RunFailed,
  RunTimeout,
  OutputParseError,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised by the AMP reader. `line()` is 1-based; 0 means end of input.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& message);

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Build or run failure of a generated program; carries the captured
/// toolchain/program output.
class ToolchainError : public Error {
 public:
  ToolchainError(ErrorCode code, const std::string& message, std::string diagnostics);

  const std::string& diagnostics() const noexcept { return diagnostics_; }

 private:
  std::string diagnostics_;
};

}  // namespace metasys
