#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>

#include "pointspeak/fusion.hpp"
#include "pointspeak/geometry.hpp"
#include "pointspeak/intent.hpp"
#include "pointspeak/vad.hpp"

namespace pointspeak::service {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct AppConfig {
  std::string http_host = "127.0.0.1";
  int http_port = 8080;

  AnchorTransform anchor;
  FusionParams fusion;
  VadConfig vad;
  BackendConfig backend;

  std::string bridge_host = "127.0.0.1";
  int bridge_port = 10000;
  bool embedded_simulator = true;  // run the robot simulator in-process
  bool bridge_enabled = true;

  std::filesystem::path labels_path = "data/labels.jsonl";
  std::filesystem::path beacons_path = "data/beacons.jsonl";
  std::filesystem::path session_log = "data/session.jsonl";

  void validate() const;
};

inline constexpr const char* kEnvPrefix = "POINTSPEAK_";

// Parses a JSON config document; absent keys keep their defaults. Relative
// paths are resolved against `base_dir`.
AppConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir = {});
AppConfig load_config(const std::filesystem::path& path);

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;
EnvLookup process_env();

// Applies POINTSPEAK_* overrides:
//   HTTP_HOST HTTP_PORT D_TH R_HIT VAD_THRESHOLD STT_URL LLM_URL
//   BACKEND_TIMEOUT FALLBACK_ENABLED BRIDGE_HOST BRIDGE_PORT
//   EMBEDDED_SIMULATOR LABELS_PATH BEACONS_PATH SESSION_LOG
void apply_env_overrides(AppConfig& cfg, const EnvLookup& env);

}  // namespace pointspeak::service
