#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pointspeak/intent.hpp"
#include "pointspeak/service/config.hpp"
#include "pointspeak/service/metrics.hpp"
#include "pointspeak/service/session_log.hpp"

namespace pointspeak::service {

struct ReplayResult {
  MetricsReport report;
  StoreSnapshot final_store;
  std::vector<Json> outcomes;  // Outcome payloads produced by the replay
};

inline constexpr std::uint64_t kReplayIdSeed = 1;

// Feeds the log through a Session on a virtual clock. Operator mode
// changes, label upserts and captures are re-applied; recorded outcomes
// are only compared against. Errors are SessionLogError with the index of
// the offending event.
ReplayResult replay_log(const SessionLog& log, const AppConfig& cfg, std::unique_ptr<VoiceAnalyzer> voice,
                        const std::optional<std::vector<Pose>>& ground_truth = std::nullopt,
                        const std::filesystem::path& media_root = {});

// Uses HttpVoiceAnalyzer with cfg.backend; an empty llm_url means the local
// fallback matcher.
MetricsReport replay(const std::filesystem::path& session_file, const AppConfig& cfg,
                     const std::optional<std::filesystem::path>& ground_truth = std::nullopt);

// Same outcome up to beacon ids (tracked through `ids`, recorded -> replayed)
// and wall-clock timings.
bool outcomes_equivalent(const Json& recorded, const Json& replayed,
                         std::map<std::string, std::string>& ids);

}  // namespace pointspeak::service
