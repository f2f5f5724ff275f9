#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace macsort {

enum class ErrorCode {
  // Input errors: malformed or inconsistent files, configs, arguments.
  JsonError,
  SchemaError,
  CaptionGrammarError,
  ParseError,
  NonPositiveBox,
  BadMagic,
  TruncatedBody,
  MalformedSidecar,
  MissingGeneralFile,
  SidecarMismatch,
  SpecError,
  ConfigError,
  FrameMismatch,
  DuplicateId,
  IoError,
  // Runtime errors: numerical or state failures while processing.
  DegenerateEmbedding,
  InvalidState,
  DimensionMismatch,
  EmptyMemory,
  EmptyInput,
  NonMonotonicFrame,
};

std::string_view error_name(ErrorCode code) noexcept;

/// True for codes caused by bad input (exit code 2 in the CLI).
bool is_input_error(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace macsort
