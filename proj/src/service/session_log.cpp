#include "pointspeak/service/session_log.hpp"

#include <cmath>
#include <sstream>

#include <fmt/format.h>

namespace pointspeak::service {
namespace {

constexpr std::pair<EventKind, const char*> kKindNames[] = {
    {EventKind::PointerSample, "PointerSample"},
    {EventKind::UtteranceStart, "UtteranceStart"},
    {EventKind::UtteranceText, "UtteranceText"},
    {EventKind::UtteranceEnd, "UtteranceEnd"},
    {EventKind::ModeChange, "ModeChange"},
    {EventKind::Outcome, "Outcome"},
    {EventKind::RobotPose, "RobotPose"},
    {EventKind::LabelUpsert, "LabelUpsert"},
};

Json pose_json(const Pose& p) {
  return Json{{"location", to_json(p.position)}, {"rotation", to_json(p.rotation)}};
}

}  // namespace

const char* to_string(EventKind k) {
  for (const auto& [kind, name] : kKindNames) {
    if (kind == k) return name;
  }
  return "?";
}

std::optional<EventKind> parse_event_kind(std::string_view s) {
  for (const auto& [kind, name] : kKindNames) {
    if (s == name) return kind;
  }
  return std::nullopt;
}

SessionLogError::SessionLogError(std::size_t index, const std::string& what)
    : std::runtime_error(index == npos ? "session header: " + what
                                       : fmt::format("session event {}: {}", index, what)),
      index_(index) {}

std::int64_t to_nanos(double t) { return std::llround(t * 1e9); }
double from_nanos(std::int64_t ns) { return static_cast<double>(ns) / 1e9; }

Json to_json(const SessionEvent& e) {
  return Json{{"t", e.t}, {"kind", to_string(e.kind)}, {"payload", e.payload}};
}

std::string encode_event(const SessionEvent& e) {
  // Whole-number times would otherwise be stored as integers.
  Json j = to_json(e);
  j["t"] = static_cast<double>(e.t);
  return dump_json(j, true);
}

SessionEvent event_from_json(const Json& j, std::size_t index) {
  if (!j.is_object()) throw SessionLogError(index, "event must be an object");
  if (!j.contains("t") || !j["t"].is_number()) throw SessionLogError(index, "missing numeric 't'");
  if (!j.contains("kind") || !j["kind"].is_string()) throw SessionLogError(index, "missing 'kind'");
  SessionEvent e;
  e.t = j["t"].get<double>();
  if (!std::isfinite(e.t) || e.t < 0.0) throw SessionLogError(index, "'t' must be finite and >= 0");
  const auto kind = parse_event_kind(j["kind"].get<std::string>());
  if (!kind) throw SessionLogError(index, "unknown kind '" + j["kind"].get<std::string>() + "'");
  e.kind = *kind;
  e.payload = j.value("payload", Json::object());
  if (!e.payload.is_object()) throw SessionLogError(index, "payload must be an object");

  try {
    switch (e.kind) {
      case EventKind::PointerSample:
        number_field(e.payload, "x");
        number_field(e.payload, "y");
        break;
      case EventKind::UtteranceText:
        if (!e.payload.contains("text") && !e.payload.contains("wav_path")) {
          throw JsonFieldError("UtteranceText needs 'text' or 'wav_path'");
        }
        if (e.payload.contains("text")) string_field(e.payload, "text");
        if (e.payload.contains("wav_path")) string_field(e.payload, "wav_path");
        break;
      case EventKind::ModeChange:
        if (!parse_mode(string_field(e.payload, "mode"))) throw JsonFieldError("unknown mode");
        break;
      case EventKind::Outcome:
        string_field(e.payload, "type");
        break;
      case EventKind::LabelUpsert:
        string_field(e.payload, "name");
        vec3_from_json(e.payload.value("location", Json()), "location");
        break;
      default:
        break;
    }
  } catch (const JsonFieldError& err) {
    throw SessionLogError(index, err.what());
  }
  return e;
}

Json to_json(const MRLabel& l) {
  return Json{{"id", l.id}, {"name", l.name}, {"location", to_json(l.location)}};
}

Json to_json(const MRBeacon& b) {
  return Json{{"id", b.id}, {"location", to_json(b.location)}, {"rotation", to_json(b.rotation)}};
}

MRLabel label_from_json(const Json& j) {
  return MRLabel{string_field(j, "id"), string_field(j, "name"),
                 vec3_from_json(j.value("location", Json()), "location")};
}

MRBeacon beacon_from_json(const Json& j) {
  MRBeacon b{string_field(j, "id"), vec3_from_json(j.value("location", Json()), "location"),
             quat_from_json(j.value("rotation", Json()), "rotation")};
  if (!b.rotation.is_yaw_only()) throw JsonFieldError("beacon rotation must be yaw-only");
  return b;
}

Json header_to_json(const SessionHeader& h) {
  Json labels = Json::array();
  for (const auto& l : h.initial.labels) labels.push_back(to_json(l));
  Json beacons = Json::array();
  for (const auto& b : h.initial.beacons) beacons.push_back(to_json(b));
  return Json{{"header", Json{{"schema_version", h.schema_version},
                              {"labels", std::move(labels)},
                              {"beacons", std::move(beacons)},
                              {"revision", h.initial.revision}}}};
}

namespace {

SessionHeader header_from_json(const Json& j) {
  SessionHeader h;
  const Json& body = j["header"];
  if (!body.is_object()) throw SessionLogError(SessionLogError::npos, "header must be an object");
  try {
    h.schema_version = static_cast<int>(number_field(body, "schema_version"));
    if (h.schema_version != kSessionSchemaVersion) {
      throw SessionLogError(SessionLogError::npos,
                            fmt::format("unsupported schema_version {}", h.schema_version));
    }
    for (const auto& l : body.value("labels", Json::array())) h.initial.labels.push_back(label_from_json(l));
    for (const auto& b : body.value("beacons", Json::array())) h.initial.beacons.push_back(beacon_from_json(b));
    if (body.contains("revision")) h.initial.revision = body["revision"].get<std::uint64_t>();
  } catch (const JsonFieldError& e) {
    throw SessionLogError(SessionLogError::npos, e.what());
  } catch (const Json::exception& e) {
    throw SessionLogError(SessionLogError::npos, e.what());
  }
  return h;
}

}  // namespace

SessionLog parse_session_log(std::string_view text) {
  SessionLog log;
  std::istringstream in{std::string(text)};
  std::string line;
  bool first_line = true;
  bool in_utterance = false;
  std::optional<std::int64_t> last_t;

  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const std::size_t index = log.events.size();
    Json j = Json::parse(line, nullptr, false);
    if (j.is_discarded()) throw SessionLogError(index, "malformed JSON");
    if (first_line && j.is_object() && j.contains("header")) {
      log.header = header_from_json(j);
      first_line = false;
      continue;
    }
    first_line = false;

    SessionEvent e = event_from_json(j, index);
    const std::int64_t t = to_nanos(e.t);
    if (last_t && t <= *last_t) throw SessionLogError(index, "events must be strictly ordered by t");
    last_t = t;

    switch (e.kind) {
      case EventKind::UtteranceStart:
        if (in_utterance) throw SessionLogError(index, "nested UtteranceStart");
        in_utterance = true;
        break;
      case EventKind::UtteranceEnd:
        if (!in_utterance) throw SessionLogError(index, "UtteranceEnd without UtteranceStart");
        in_utterance = false;
        break;
      case EventKind::PointerSample:
      case EventKind::UtteranceText:
        if (!in_utterance) {
          throw SessionLogError(index, std::string(to_string(e.kind)) + " outside an utterance");
        }
        break;
      default:
        break;
    }
    log.events.push_back(std::move(e));
  }
  if (in_utterance) throw SessionLogError(log.events.size(), "log ends inside an utterance");
  return log;
}

SessionLog read_session_log(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read session log " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_session_log(ss.str());
}

Json outcome_to_json(const FusionOutcome& o, Mode mode) {
  Json j{{"type", outcome_type(o)}, {"mode", to_string(mode)}};
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, BeaconsCreated>) {
          Json arr = Json::array();
          for (const auto& b : v.beacons) arr.push_back(to_json(b));
          j["beacons"] = std::move(arr);
        } else if constexpr (std::is_same_v<T, BeaconMoved>) {
          j["beacon"] = to_json(v.beacon);
        } else if constexpr (std::is_same_v<T, BeaconTaken>) {
          j["id"] = v.id;
        } else if constexpr (std::is_same_v<T, NavDispatched>) {
          j["beacon_id"] = v.beacon_id;
          j["goal"] = pose_json(v.goal);
        } else if constexpr (std::is_same_v<T, BeaconDeleted>) {
          j["id"] = v.id;
        } else if constexpr (std::is_same_v<T, Rejected>) {
          j["reason"] = to_string(v.reason);
          j["detail"] = v.detail;
        }
      },
      o);
  return j;
}

SessionLogWriter::SessionLogWriter(const std::filesystem::path& path, const SessionHeader& header) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  out_.open(path, std::ios::binary | std::ios::trunc);
  if (!out_) throw std::runtime_error("cannot open session log " + path.string());
  out_ << dump_json(header_to_json(header)) << '\n';
  out_.flush();
}

void SessionLogWriter::append(const SessionEvent& e) {
  if (!out_.is_open()) return;
  out_ << encode_event(e) << '\n';
  out_.flush();
}

}  // namespace pointspeak::service
