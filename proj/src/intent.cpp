#include "pointspeak/intent.hpp"

#include <chrono>
#include <cmath>
#include <set>

#include "httplib.h"
#include "pointspeak/json_io.hpp"
#include "pointspeak/text.hpp"

namespace pointspeak {
namespace {

struct Endpoint {
  std::string origin;  // scheme://host:port
  std::string path;
};

Endpoint split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw BackendTransportError("backend url must include a scheme: " + url);
  }
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

std::string post(const std::string& url, const std::string& body, const char* content_type,
                 double timeout) {
  const Endpoint ep = split_url(url);
  httplib::Client client(ep.origin);
  const auto secs = static_cast<time_t>(timeout);
  const auto usecs = static_cast<time_t>((timeout - static_cast<double>(secs)) * 1e6);
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);
  auto res = client.Post(ep.path, body, content_type);
  if (!res) {
    throw BackendTransportError("request to " + url + " failed: " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw BackendTransportError("request to " + url + " returned HTTP " +
                                std::to_string(res->status));
  }
  return res->body;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string join(const std::vector<std::string>& parts, std::size_t from, std::size_t count) {
  std::string out;
  for (std::size_t i = from; i < from + count; ++i) {
    if (i > from) out.push_back(' ');
    out += parts[i];
  }
  return out;
}

}  // namespace

const char* to_string(Keyword k) {
  switch (k) {
    case Keyword::Take: return "take";
    case Keyword::Go: return "go";
    case Keyword::Delete: return "delete";
  }
  return "?";
}

const char* to_string(LabelSource s) {
  switch (s) {
    case LabelSource::None: return "none";
    case LabelSource::Llm: return "llm";
    case LabelSource::Fallback: return "fallback";
  }
  return "?";
}

Utterance Utterance::from_text(double t_start, double t_end, std::string text) {
  Utterance u{t_start, t_end, std::move(text)};
  u.validate();
  return u;
}

Utterance Utterance::from_audio(double t_start, double t_end, std::vector<std::uint8_t> wav) {
  Utterance u{t_start, t_end, AudioPayload{std::move(wav)}};
  u.validate();
  return u;
}

void Utterance::validate() const {
  if (!std::isfinite(t_start) || !std::isfinite(t_end) || !(t_start < t_end)) {
    throw std::invalid_argument("utterance must satisfy t_start < t_end");
  }
}

void BackendConfig::validate() const {
  if (!(timeout > 0.0) || !std::isfinite(timeout)) {
    throw std::invalid_argument("backend timeout must be > 0");
  }
  if (!(fallback_budget >= 0.0 && fallback_budget < 1.0)) {
    throw std::invalid_argument("fallback budget must lie in [0, 1)");
  }
}

std::string transcribe(const Utterance& u, const BackendConfig& cfg) {
  if (const auto* text = std::get_if<std::string>(&u.payload)) {
    return *text;
  }
  if (cfg.stt_url.empty()) {
    throw BackendTransportError("no speech-to-text backend configured");
  }
  const auto& wav = std::get<AudioPayload>(u.payload).wav;
  const std::string reply = post(cfg.stt_url, std::string(wav.begin(), wav.end()), "audio/wav",
                                 cfg.timeout);
  const Json body = Json::parse(reply, nullptr, false);
  if (body.is_discarded() || !body.is_object() || !body.contains("text") ||
      !body["text"].is_string()) {
    throw IntentParseError("speech backend reply is not {\"text\": string}");
  }
  return body["text"].get<std::string>();
}

IntentResult extract_labels_llm(std::string_view text, std::span<const std::string> known_labels,
                                const BackendConfig& cfg) {
  if (cfg.llm_url.empty()) {
    throw BackendTransportError("no language model backend configured");
  }
  Json request = {{"text", std::string(text)}, {"labels", Json::array()}};
  for (const auto& name : known_labels) request["labels"].push_back(name);
  const std::string reply = post(cfg.llm_url, request.dump(), "application/json", cfg.timeout);

  const Json body = Json::parse(reply, nullptr, false);
  if (body.is_discarded() || !body.is_object() || body.size() != 1 || !body.contains("labels") ||
      !body["labels"].is_array()) {
    throw IntentParseError("language model reply is not {\"labels\": [...]}");
  }

  IntentResult result;
  result.raw_text = std::string(text);
  result.source = LabelSource::Llm;
  std::vector<std::string> unknown;
  for (const auto& item : body["labels"]) {
    if (!item.is_string()) {
      throw IntentParseError("language model labels must be strings");
    }
    const std::string canon = canonical_name(item.get<std::string>());
    const std::string* match = nullptr;
    for (const auto& known : known_labels) {
      if (canonical_name(known) == canon) {
        match = &known;
        break;
      }
    }
    if (match) {
      result.labels.push_back(*match);
    } else {
      unknown.push_back(item.get<std::string>());
    }
  }
  if (!unknown.empty()) {
    throw IntentValidationError("language model named unknown labels", std::move(unknown));
  }
  return result;
}

IntentResult extract_labels_fallback(std::string_view text,
                                     std::span<const std::string> known_labels, double budget) {
  IntentResult result;
  result.raw_text = std::string(text);
  result.source = LabelSource::Fallback;

  const std::vector<std::string> tokens = normalize_tokens(text);
  struct Candidate {
    std::size_t index;
    std::u32string form;
    std::size_t token_count;
    std::size_t budget;
  };
  std::vector<Candidate> candidates;
  for (std::size_t i = 0; i < known_labels.size(); ++i) {
    const auto label_tokens = normalize_tokens(known_labels[i]);
    if (label_tokens.empty()) continue;
    std::u32string form = utf8_decode(join(label_tokens, 0, label_tokens.size()));
    // Very short names only match exactly; "tv" is one edit from "to".
    const std::size_t allowed =
        form.size() < 4
            ? 0
            : static_cast<std::size_t>(std::ceil(budget * static_cast<double>(form.size()) - 1e-9));
    candidates.push_back({i, std::move(form), label_tokens.size(), allowed});
  }

  std::set<std::size_t> emitted;
  std::size_t pos = 0;
  while (pos < tokens.size()) {
    std::optional<std::size_t> best_label;
    std::size_t best_dist = 0;
    std::size_t best_width = 0;
    for (const auto& c : candidates) {
      const std::size_t lo = c.token_count > 1 ? c.token_count - 1 : 1;
      for (std::size_t width = lo; width <= c.token_count + 1; ++width) {
        if (pos + width > tokens.size()) break;
        const std::size_t d = edit_distance(utf8_decode(join(tokens, pos, width)), c.form);
        if (d > c.budget) continue;
        if (!best_label || d < best_dist) {
          best_label = c.index;
          best_dist = d;
          best_width = width;
        }
      }
    }
    if (!best_label) {
      ++pos;
      continue;
    }
    if (emitted.insert(*best_label).second) {
      result.labels.push_back(known_labels[*best_label]);
    }
    pos += best_width;
  }

  if (result.labels.empty()) {
    result.keyword = detect_keyword(text);
    if (!result.keyword) result.source = LabelSource::None;
  }
  return result;
}

std::optional<Keyword> detect_keyword(std::string_view text) {
  for (const auto& token : normalize_tokens(text)) {
    if (token == "take") return Keyword::Take;
    if (token == "go") return Keyword::Go;
    if (token == "delete") return Keyword::Delete;
  }
  return std::nullopt;
}

IntentResult interpret(const Utterance& u, std::span<const std::string> known_labels,
                       const BackendConfig& cfg) {
  IntentResult result;
  const auto stt_start = std::chrono::steady_clock::now();
  try {
    result.raw_text = transcribe(u, cfg);
  } catch (const BackendTransportError&) {
    result.stt_seconds = seconds_since(stt_start);
    return result;
  } catch (const IntentParseError&) {
    result.stt_seconds = seconds_since(stt_start);
    return result;
  }
  result.stt_seconds = u.is_text() ? 0.0 : seconds_since(stt_start);
  if (normalize_tokens(result.raw_text).empty()) {
    return result;
  }

  bool use_fallback = false;
  const auto llm_start = std::chrono::steady_clock::now();
  try {
    IntentResult llm = extract_labels_llm(result.raw_text, known_labels, cfg);
    result.labels = std::move(llm.labels);
    result.source = LabelSource::Llm;
  } catch (const IntentValidationError& e) {
    result.unresolved = e.unknown_labels();
    use_fallback = true;
  } catch (const BackendTransportError&) {
    use_fallback = true;
  } catch (const IntentParseError&) {
    use_fallback = true;
  }
  result.llm_seconds = seconds_since(llm_start);

  if (use_fallback && cfg.fallback_enabled) {
    IntentResult local = extract_labels_fallback(result.raw_text, known_labels, cfg.fallback_budget);
    result.labels = std::move(local.labels);
    result.source = result.labels.empty() ? LabelSource::None : LabelSource::Fallback;
  }
  if (result.labels.empty()) {
    result.keyword = detect_keyword(result.raw_text);
  } else {
    result.unresolved.clear();
  }
  return result;
}

HttpVoiceAnalyzer::HttpVoiceAnalyzer(BackendConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }

std::string HttpVoiceAnalyzer::transcribe(const Utterance& u) {
  return pointspeak::transcribe(u, cfg_);
}

IntentResult HttpVoiceAnalyzer::interpret(const Utterance& u,
                                          std::span<const std::string> known_labels) {
  return pointspeak::interpret(u, known_labels, cfg_);
}

}  // namespace pointspeak
