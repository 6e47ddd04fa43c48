#include "metasys/error.hpp"

#include <utility>

namespace metasys {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::StateDomainViolation: return "StateDomainViolation";
    case ErrorCode::UpdateDomainViolation: return "UpdateDomainViolation";
    case ErrorCode::TooFewEntities: return "TooFewEntities";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::BadCharacter: return "BadCharacter";
    case ErrorCode::BadDimensions: return "BadDimensions";
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::UnsupportedKind: return "UnsupportedKind";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::SemanticError: return "SemanticError";
    case ErrorCode::NoBackendConfigured: return "NoBackendConfigured";
    case ErrorCode::CompileFailed: return "CompileFailed";
    case ErrorCode::RunFailed: return "RunFailed";
    case ErrorCode::RunTimeout: return "RunTimeout";
    case ErrorCode::OutputParseError: return "OutputParseError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(message), code_(code) {}

ParseError::ParseError(std::size_t line, const std::string& message)
    : Error(ErrorCode::ParseError,
            line == 0 ? message : "line " + std::to_string(line) + ": " + message),
      line_(line) {}

ToolchainError::ToolchainError(ErrorCode code, const std::string& message,
                               std::string diagnostics)
    : Error(code, message), diagnostics_(std::move(diagnostics)) {}

}  // namespace metasys
