#include "pointspeak/service/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "pointspeak/json_io.hpp"

namespace pointspeak::service {
namespace {

template <typename T>
void read_into(const Json& obj, const char* key, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj[key].get<T>();
  } catch (const Json::exception&) {
    throw ConfigError(std::string("config field '") + key + "' has the wrong type");
  }
}

const Json& section(const Json& root, const char* key) {
  static const Json empty = Json::object();
  if (!root.contains(key)) return empty;
  if (!root[key].is_object()) throw ConfigError(std::string("config section '") + key + "' must be an object");
  return root[key];
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::filesystem::path& p) {
  if (p.empty() || p.is_absolute() || base.empty()) return p;
  return base / p;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError(std::string(kEnvPrefix) + key + " must be a number, got '" + v + "'");
  }
}

int to_int(const std::string& key, const std::string& v) {
  const double d = to_double(key, v);
  if (d != static_cast<int>(d)) {
    throw ConfigError(std::string(kEnvPrefix) + key + " must be an integer");
  }
  return static_cast<int>(d);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw ConfigError(std::string(kEnvPrefix) + key + " must be a boolean");
}

}  // namespace

void AppConfig::validate() const {
  try {
    fusion.validate();
    vad.validate();
    backend.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (http_port < 0 || http_port > 65535) throw ConfigError("http port out of range");
  if (bridge_port < 0 || bridge_port > 65535) throw ConfigError("bridge port out of range");
  if (labels_path.empty() || beacons_path.empty()) throw ConfigError("store paths must be set");
}

AppConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir) {
  const Json root = Json::parse(json_text, nullptr, false);
  if (root.is_discarded() || !root.is_object()) throw ConfigError("config is not a JSON object");

  AppConfig cfg;
  const Json& http = section(root, "http");
  read_into(http, "host", cfg.http_host);
  read_into(http, "port", cfg.http_port);

  const Json& anchor = section(root, "anchor");
  try {
    if (anchor.contains("translation")) {
      cfg.anchor.translation = vec3_from_json(anchor["translation"], "anchor.translation");
    }
    if (anchor.contains("rotation")) {
      cfg.anchor.rotation = quat_from_json(anchor["rotation"], "anchor.rotation");
    } else if (anchor.contains("yaw")) {
      cfg.anchor.rotation = yaw_to_quat(number_field(anchor, "yaw"));
    }
  } catch (const JsonFieldError& e) {
    throw ConfigError(e.what());
  }

  read_into(section(root, "clustering"), "d_th", cfg.fusion.cluster.d_th);
  read_into(root, "r_hit", cfg.fusion.r_hit);

  const Json& vad = section(root, "vad");
  read_into(vad, "threshold", cfg.vad.threshold);
  read_into(vad, "sample_rate", cfg.vad.sample_rate);
  read_into(vad, "frame_len", cfg.vad.frame_len);
  read_into(vad, "onset_frames", cfg.vad.onset_frames);
  read_into(vad, "silence_duration", cfg.vad.silence_duration);

  const Json& backend = section(root, "backend");
  read_into(backend, "stt_url", cfg.backend.stt_url);
  read_into(backend, "llm_url", cfg.backend.llm_url);
  read_into(backend, "timeout", cfg.backend.timeout);
  read_into(backend, "fallback_enabled", cfg.backend.fallback_enabled);
  read_into(backend, "fallback_budget", cfg.backend.fallback_budget);

  const Json& bridge = section(root, "bridge");
  read_into(bridge, "host", cfg.bridge_host);
  read_into(bridge, "port", cfg.bridge_port);
  read_into(bridge, "embedded_simulator", cfg.embedded_simulator);
  read_into(bridge, "enabled", cfg.bridge_enabled);

  const Json& store = section(root, "store");
  std::string labels = cfg.labels_path.string();
  std::string beacons = cfg.beacons_path.string();
  std::string log = cfg.session_log.string();
  read_into(store, "labels", labels);
  read_into(store, "beacons", beacons);
  read_into(root, "session_log", log);
  cfg.labels_path = resolve(base_dir, labels);
  cfg.beacons_path = resolve(base_dir, beacons);
  cfg.session_log = resolve(base_dir, log);
  return cfg;
}

AppConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path());
}

EnvLookup process_env() {
  return [](const std::string& name) -> std::optional<std::string> {
    if (const char* v = std::getenv(name.c_str())) return std::string(v);
    return std::nullopt;
  };
}

void apply_env_overrides(AppConfig& cfg, const EnvLookup& env) {
  auto get = [&](const char* key) { return env(std::string(kEnvPrefix) + key); };
  if (auto v = get("HTTP_HOST")) cfg.http_host = *v;
  if (auto v = get("HTTP_PORT")) cfg.http_port = to_int("HTTP_PORT", *v);
  if (auto v = get("D_TH")) cfg.fusion.cluster.d_th = to_double("D_TH", *v);
  if (auto v = get("R_HIT")) cfg.fusion.r_hit = to_double("R_HIT", *v);
  if (auto v = get("VAD_THRESHOLD")) cfg.vad.threshold = to_double("VAD_THRESHOLD", *v);
  if (auto v = get("STT_URL")) cfg.backend.stt_url = *v;
  if (auto v = get("LLM_URL")) cfg.backend.llm_url = *v;
  if (auto v = get("BACKEND_TIMEOUT")) cfg.backend.timeout = to_double("BACKEND_TIMEOUT", *v);
  if (auto v = get("FALLBACK_ENABLED")) cfg.backend.fallback_enabled = to_bool("FALLBACK_ENABLED", *v);
  if (auto v = get("BRIDGE_HOST")) cfg.bridge_host = *v;
  if (auto v = get("BRIDGE_PORT")) cfg.bridge_port = to_int("BRIDGE_PORT", *v);
  if (auto v = get("EMBEDDED_SIMULATOR")) cfg.embedded_simulator = to_bool("EMBEDDED_SIMULATOR", *v);
  if (auto v = get("LABELS_PATH")) cfg.labels_path = *v;
  if (auto v = get("BEACONS_PATH")) cfg.beacons_path = *v;
  if (auto v = get("SESSION_LOG")) cfg.session_log = *v;
}

}  // namespace pointspeak::service
