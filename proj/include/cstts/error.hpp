#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cstts {

enum class ErrorCode {
  empty_input,
  invalid_argument,
  invalid_lang_code,
  unknown_script,
  degenerate_split,
  no_locale_rule,
  no_voice_for_language,
  size_limit_exceeded,
  invalid_audio,
  non_canonical_input,
  engine_failure,
  silent_window,
  config_error,
  io_error,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::empty_input: return "EmptyInput";
    case ErrorCode::invalid_argument: return "InvalidArgument";
    case ErrorCode::invalid_lang_code: return "InvalidLangCode";
    case ErrorCode::unknown_script: return "UnknownScript";
    case ErrorCode::degenerate_split: return "DegenerateSplit";
    case ErrorCode::no_locale_rule: return "NoLocaleRule";
    case ErrorCode::no_voice_for_language: return "NoVoiceForLanguage";
    case ErrorCode::size_limit_exceeded: return "SizeLimitExceeded";
    case ErrorCode::invalid_audio: return "InvalidAudio";
    case ErrorCode::non_canonical_input: return "NonCanonicalInput";
    case ErrorCode::engine_failure: return "EngineFailure";
    case ErrorCode::silent_window: return "SilentWindow";
    case ErrorCode::config_error: return "ConfigError";
    case ErrorCode::io_error: return "IoError";
  }
  return "Unknown";
}

/// Base exception for every failure raised by the library. `stage` names the
/// pipeline stage that raised it; it is empty until the pipeline fills it in.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string stage = {})
      : std::runtime_error(message), code_(code), stage_(std::move(stage)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& stage() const noexcept { return stage_; }
  void set_stage(std::string stage) { stage_ = std::move(stage); }

 private:
  ErrorCode code_;
  std::string stage_;
};

/// Transport or engine error from a synthesis backend.
class EngineFailure : public Error {
 public:
  EngineFailure(int status, const std::string& message, bool retryable)
      : Error(ErrorCode::engine_failure, message), status_(status), retryable_(retryable) {}

  int status() const noexcept { return status_; }
  bool retryable() const noexcept { return retryable_; }

  // Index of the plan entry whose request failed; -1 for whole-utterance requests.
  long entry_index() const noexcept { return entry_index_; }
  void set_entry_index(long index) noexcept { entry_index_ = index; }

 private:
  int status_;
  bool retryable_;
  long entry_index_ = -1;
};

}  // namespace cstts
