#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pointspeak/bridge/messages.hpp"
#include "pointspeak/clock.hpp"
#include "pointspeak/fusion.hpp"
#include "pointspeak/service/metrics.hpp"
#include "pointspeak/service/session_log.hpp"
#include "pointspeak/vad.hpp"
#include "pointspeak/world_store.hpp"

namespace pointspeak::service {

// Malformed client input (HTTP 400).
class RequestError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct CaptureRequest {
  std::optional<std::string> text;
  std::optional<std::string> wav_path;
  std::optional<double> t_start;
  std::optional<double> t_end;
  std::vector<PointerSample> pointer;

  // {"text"|"wav_path", "t_start"?, "t_end"?, "pointer": [[t,x,y(,z)], ...]}
  static CaptureRequest from_json(const Json& j);
};

// A capture with final timestamps, as recorded in the log.
struct PendingCapture {
  double t_start = 0.0;
  double t_end = 0.0;
  std::vector<PointerSample> pointer;
  std::optional<std::string> text;
  std::optional<std::string> wav_path;
  std::optional<double> vad_threshold;  // wav captures; defaults to the live threshold
};

struct CaptureResult {
  FusionOutcome outcome;
  Json payload;  // the Outcome event payload
  double t = 0.0;
};

struct SessionOptions {
  FusionParams fusion;
  VadConfig vad;
  AnchorTransform anchor;
  // Store persistence after every mutation; empty paths disable it.
  std::filesystem::path labels_path;
  std::filesystem::path beacons_path;
  // Empty disables recording.
  std::filesystem::path log_path;
  // Relative wav paths are resolved against this directory first.
  std::filesystem::path media_root;
};

// One operator session. All entry points are serialized on an internal
// mutex and every state change is emitted as a SessionEvent, in order, to
// the log, the metrics accumulator and the subscribers.
class Session {
 public:
  using Listener = std::function<void(const SessionEvent&)>;
  using GoalSink = std::function<void(const bridge::NavGoal&)>;

  // Loads the store from the persistence paths unless `initial` is given.
  Session(SessionOptions opts, std::unique_ptr<VoiceAnalyzer> voice, std::shared_ptr<Clock> clock,
          IdGenerator ids = random_guid_generator(), std::optional<StoreSnapshot> initial = std::nullopt);
  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;

  int subscribe(Listener listener);
  void unsubscribe(int token);
  // Receives Go goals in the Map frame.
  void set_goal_sink(GoalSink sink);

  Json state() const;
  Mode mode() const;
  MetricsReport metrics() const;
  StoreSnapshot snapshot() const;
  double vad_threshold() const;

  Mode set_mode(Mode m);
  MRLabel upsert_label(const std::string& name, const Vec3& location, bool overwrite = false);

  // Live capture: times are shifted so the window ends at receipt time.
  CaptureResult capture(const CaptureRequest& req);
  // Capture with final timestamps (replay). The Outcome is stamped with the
  // session clock.
  CaptureResult capture_at(const PendingCapture& pc);

  double calibrate_rms(std::span<const double> rms, std::optional<double> frame_len = std::nullopt);
  double calibrate_wav(const std::filesystem::path& path);

  // Robot feedback (Map frame). Logged when pose or status changes.
  void on_robot(const bridge::TfSample& tf, std::optional<bridge::StatusUpdate> status, bool connected);

 private:
  double stamp(double t);
  void emit(double t, EventKind kind, Json payload);
  CaptureResult capture_locked(const PendingCapture& pc);
  void persist();
  std::filesystem::path resolve_media(const std::string& p) const;

  mutable std::mutex mutex_;
  SessionOptions opts_;
  std::unique_ptr<VoiceAnalyzer> voice_;
  std::shared_ptr<Clock> clock_;
  WorldStore store_;
  FusionEngine engine_;
  SessionLogWriter log_;
  MetricsAccumulator metrics_;
  std::optional<std::int64_t> last_ns_;

  std::map<int, Listener> listeners_;
  int next_token_ = 1;
  GoalSink goal_sink_;
  std::uint64_t goal_seq_ = 0;

  std::optional<Json> robot_;
  bool robot_connected_ = false;
};

}  // namespace pointspeak::service
