#include "macsort/errors.hpp"

namespace macsort {

std::string_view error_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::JsonError: return "JsonError";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::CaptionGrammarError: return "CaptionGrammarError";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::NonPositiveBox: return "NonPositiveBox";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::TruncatedBody: return "TruncatedBody";
    case ErrorCode::MalformedSidecar: return "MalformedSidecar";
    case ErrorCode::MissingGeneralFile: return "MissingGeneralFile";
    case ErrorCode::SidecarMismatch: return "SidecarMismatch";
    case ErrorCode::SpecError: return "SpecError";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::FrameMismatch: return "FrameMismatch";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::DegenerateEmbedding: return "DegenerateEmbedding";
    case ErrorCode::InvalidState: return "InvalidState";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptyMemory: return "EmptyMemory";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::NonMonotonicFrame: return "NonMonotonicFrame";
  }
  return "UnknownError";
}

bool is_input_error(ErrorCode code) noexcept {
  return static_cast<int>(code) <= static_cast<int>(ErrorCode::IoError);
}

}  // namespace macsort
