#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pointspeak/fusion.hpp"
#include "pointspeak/json_io.hpp"
#include "pointspeak/world_store.hpp"

namespace pointspeak::service {

// LabelUpsert is an addition to the recorded kinds so that replays see the
// same label set the live session had.
enum class EventKind {
  PointerSample,
  UtteranceStart,
  UtteranceText,
  UtteranceEnd,
  ModeChange,
  Outcome,
  RobotPose,
  LabelUpsert,
};

const char* to_string(EventKind k);
std::optional<EventKind> parse_event_kind(std::string_view s);

struct SessionEvent {
  double t = 0.0;
  EventKind kind = EventKind::PointerSample;
  Json payload = Json::object();
};

inline constexpr int kSessionSchemaVersion = 1;

// Optional first line of a log: {"header": {...}} with the store contents
// at the moment recording started.
struct SessionHeader {
  int schema_version = kSessionSchemaVersion;
  StoreSnapshot initial;
};

struct SessionLog {
  std::optional<SessionHeader> header;
  std::vector<SessionEvent> events;
};

class SessionLogError : public std::runtime_error {
 public:
  // index is the 0-based event index (header excluded); npos for the header.
  SessionLogError(std::size_t index, const std::string& what);
  std::size_t index() const { return index_; }

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  std::size_t index_;
};

Json to_json(const SessionEvent& e);
std::string encode_event(const SessionEvent& e);
SessionEvent event_from_json(const Json& j, std::size_t index = 0);

Json to_json(const MRLabel& l);
Json to_json(const MRBeacon& b);
MRLabel label_from_json(const Json& j);
MRBeacon beacon_from_json(const Json& j);

Json header_to_json(const SessionHeader& h);

// Checks: strictly increasing t, UtteranceStart/End nesting, pointer samples
// and transcripts only inside an utterance.
SessionLog parse_session_log(std::string_view text);
SessionLog read_session_log(const std::filesystem::path& path);

// Outcome payload for the log and event stream.
Json outcome_to_json(const FusionOutcome& o, Mode mode);

// Append-only writer, one line per event, flushed per line.
class SessionLogWriter {
 public:
  SessionLogWriter() = default;
  // Truncates an existing file.
  SessionLogWriter(const std::filesystem::path& path, const SessionHeader& header);

  bool is_open() const { return out_.is_open(); }
  void append(const SessionEvent& e);

 private:
  std::ofstream out_;
};

// Quantizes to whole nanoseconds so values survive the 9-decimal log format.
std::int64_t to_nanos(double t);
double from_nanos(std::int64_t ns);

}  // namespace pointspeak::service
