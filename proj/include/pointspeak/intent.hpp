#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace pointspeak {

enum class Keyword { Take, Go, Delete };

const char* to_string(Keyword k);

struct AudioPayload {
  std::vector<std::uint8_t> wav;  // PCM16 mono WAV bytes
};

struct Utterance {
  double t_start = 0.0;
  double t_end = 0.0;
  std::variant<std::string, AudioPayload> payload;

  static Utterance from_text(double t_start, double t_end, std::string text);
  static Utterance from_audio(double t_start, double t_end, std::vector<std::uint8_t> wav);

  bool is_text() const { return std::holds_alternative<std::string>(payload); }
  void validate() const;
};

enum class LabelSource { None, Llm, Fallback };

const char* to_string(LabelSource s);

struct IntentResult {
  std::vector<std::string> labels;  // known label names, order of mention
  std::optional<Keyword> keyword;
  std::string raw_text;
  LabelSource source = LabelSource::None;
  // Names the language model produced that match no known label.
  std::vector<std::string> unresolved;
  double stt_seconds = 0.0;
  double llm_seconds = 0.0;

  bool empty() const { return labels.empty() && !keyword; }
};

struct BackendConfig {
  std::string stt_url;  // empty: no speech backend configured
  std::string llm_url;  // empty: labels come from the fallback matcher only
  double timeout = 5.0;  // seconds
  bool fallback_enabled = true;
  double fallback_budget = 0.3;  // edit budget as a fraction of label length

  void validate() const;
};

class BackendTransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IntentParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IntentValidationError : public std::runtime_error {
 public:
  IntentValidationError(const std::string& what, std::vector<std::string> unknown)
      : std::runtime_error(what), unknown_(std::move(unknown)) {}
  const std::vector<std::string>& unknown_labels() const { return unknown_; }

 private:
  std::vector<std::string> unknown_;
};

// Text payloads are returned verbatim. Audio goes to POST {stt_url} and the
// {"text": ...} reply is returned; an empty transcript is valid.
std::string transcribe(const Utterance& u, const BackendConfig& cfg);

// POST {llm_url} with {"text", "labels"}; expects exactly {"labels": [string, ...]}.
// Returned names are mapped onto the byte-exact known spelling.
IntentResult extract_labels_llm(std::string_view text, std::span<const std::string> known_labels,
                                const BackendConfig& cfg);

// Deterministic local matcher for degraded transcripts.
IntentResult extract_labels_fallback(std::string_view text,
                                     std::span<const std::string> known_labels,
                                     double budget = 0.3);

// Exact whole-word command keyword, first occurrence.
std::optional<Keyword> detect_keyword(std::string_view text);

// Full voice pipeline: transcribe, ask the model, fall back locally on any
// model failure. Never throws for backend trouble; an un-interpretable
// utterance yields an empty result.
IntentResult interpret(const Utterance& u, std::span<const std::string> known_labels,
                       const BackendConfig& cfg);

// Seam used by the fusion engine.
class VoiceAnalyzer {
 public:
  virtual ~VoiceAnalyzer() = default;
  virtual std::string transcribe(const Utterance& u) = 0;
  virtual IntentResult interpret(const Utterance& u, std::span<const std::string> known_labels) = 0;
};

class HttpVoiceAnalyzer final : public VoiceAnalyzer {
 public:
  explicit HttpVoiceAnalyzer(BackendConfig cfg);

  std::string transcribe(const Utterance& u) override;
  IntentResult interpret(const Utterance& u, std::span<const std::string> known_labels) override;

  const BackendConfig& config() const { return cfg_; }

 private:
  BackendConfig cfg_;
};

}  // namespace pointspeak
