#include "pointspeak/service/session.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iterator>

#include <fmt/format.h>

#include "pointspeak/wav.hpp"

namespace pointspeak::service {
namespace {

constexpr std::int64_t kMinGapNs = 1000;  // 1 us between consecutive events

double elapsed_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw RequestError("cannot read audio file " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Json pose_payload(const Pose& p) {
  double yaw = 0.0;
  try {
    yaw = quat_to_yaw(p.rotation);
  } catch (const FrameMisuseError&) {
    yaw = 0.0;
  }
  return Json{{"location", to_json(p.position)}, {"rotation", to_json(p.rotation)}, {"yaw", yaw}};
}

bool mutates_store(const FusionOutcome& o) {
  return std::holds_alternative<BeaconsCreated>(o) || std::holds_alternative<BeaconMoved>(o) ||
         std::holds_alternative<BeaconDeleted>(o);
}

// Voiced span of a recording placed at t0, or nullopt when no onset is found.
std::optional<std::pair<double, double>> voiced_span(const PcmAudio& audio, VadConfig cfg,
                                                     double t0) {
  cfg.sample_rate = audio.sample_rate;
  const std::vector<AudioFrame> frames = make_frames(audio.samples, cfg, t0);
  if (frames.empty()) return std::nullopt;
  const std::vector<VadEvent> events = detect_events(frames, cfg);
  std::optional<double> start;
  for (const VadEvent& e : events) {
    if (e.kind == VadEventKind::Onset && !start) {
      // The onset is stamped on the frame that completed the debounce.
      start = std::max(t0, e.t - (cfg.onset_frames - 1) * cfg.frame_len);
    } else if (e.kind == VadEventKind::Silence && start) {
      return std::make_pair(*start, e.t);
    }
  }
  if (!start) return std::nullopt;
  return std::make_pair(*start, frames.back().t + cfg.frame_len);
}

}  // namespace

CaptureRequest CaptureRequest::from_json(const Json& j) {
  if (!j.is_object()) throw RequestError("capture body must be a JSON object");
  CaptureRequest r;
  if (j.contains("text")) {
    if (!j["text"].is_string()) throw RequestError("'text' must be a string");
    r.text = j["text"].get<std::string>();
  }
  if (j.contains("wav_path")) {
    if (!j["wav_path"].is_string()) throw RequestError("'wav_path' must be a string");
    r.wav_path = j["wav_path"].get<std::string>();
  }
  if (r.text.has_value() == r.wav_path.has_value()) {
    throw RequestError("capture needs exactly one of 'text' or 'wav_path'");
  }
  for (const char* key : {"t_start", "t_end"}) {
    if (!j.contains(key)) continue;
    if (!j[key].is_number() || !std::isfinite(j[key].get<double>())) {
      throw RequestError(std::string("'") + key + "' must be a finite number");
    }
    (std::string(key) == "t_start" ? r.t_start : r.t_end) = j[key].get<double>();
  }
  const Json pointer = j.value("pointer", Json::array());
  if (!pointer.is_array()) throw RequestError("'pointer' must be an array");
  for (std::size_t i = 0; i < pointer.size(); ++i) {
    const Json& s = pointer[i];
    if (!s.is_array() || s.size() < 3 || s.size() > 4) {
      throw RequestError(fmt::format("pointer[{}] must be [t, x, y] or [t, x, y, z]", i));
    }
    double v[4] = {0, 0, 0, 0};
    for (std::size_t k = 0; k < s.size(); ++k) {
      if (!s[k].is_number() || !std::isfinite(s[k].get<double>())) {
        throw RequestError(fmt::format("pointer[{}] must contain finite numbers", i));
      }
      v[k] = s[k].get<double>();
    }
    r.pointer.push_back({v[0], Vec3{v[1], v[2], v[3]}});
  }
  return r;
}

Session::Session(SessionOptions opts, std::unique_ptr<VoiceAnalyzer> voice,
                 std::shared_ptr<Clock> clock, IdGenerator ids, std::optional<StoreSnapshot> initial)
    : opts_(std::move(opts)),
      voice_(std::move(voice)),
      clock_(std::move(clock)),
      store_(std::move(ids)),
      engine_(store_, *voice_, opts_.fusion) {
  if (!clock_) clock_ = std::make_shared<SteadyClock>();
  opts_.vad.validate();
  if (initial) {
    store_.restore(*initial);
  } else if (!opts_.labels_path.empty() && !opts_.beacons_path.empty()) {
    store_.load(opts_.labels_path, opts_.beacons_path);
  }
  if (!opts_.log_path.empty()) {
    log_ = SessionLogWriter(opts_.log_path, SessionHeader{kSessionSchemaVersion, store_.snapshot()});
  }
}

int Session::subscribe(Listener listener) {
  std::lock_guard lock(mutex_);
  const int token = next_token_++;
  listeners_.emplace(token, std::move(listener));
  return token;
}

void Session::unsubscribe(int token) {
  std::lock_guard lock(mutex_);
  listeners_.erase(token);
}

void Session::set_goal_sink(GoalSink sink) {
  std::lock_guard lock(mutex_);
  goal_sink_ = std::move(sink);
}

double Session::stamp(double t) {
  std::int64_t ns = to_nanos(t);
  if (last_ns_ && ns <= *last_ns_) ns = *last_ns_ + kMinGapNs;
  last_ns_ = ns;
  return from_nanos(ns);
}

void Session::emit(double t, EventKind kind, Json payload) {
  const SessionEvent e{t, kind, std::move(payload)};
  log_.append(e);
  metrics_.observe(e);
  for (auto& [token, listener] : listeners_) listener(e);
}

void Session::persist() {
  if (opts_.labels_path.empty() || opts_.beacons_path.empty()) return;
  store_.save(opts_.labels_path, opts_.beacons_path);
}

std::filesystem::path Session::resolve_media(const std::string& p) const {
  const std::filesystem::path path(p);
  if (path.is_relative() && !opts_.media_root.empty()) {
    const std::filesystem::path candidate = opts_.media_root / path;
    if (std::filesystem::exists(candidate)) return candidate;
  }
  return path;
}

Json Session::state() const {
  std::lock_guard lock(mutex_);
  Json labels = Json::array();
  for (const auto& l : store_.labels()) labels.push_back(to_json(l));
  Json beacons = Json::array();
  for (const auto& b : store_.beacons()) {
    Json j = to_json(b);
    j["yaw"] = quat_to_yaw(b.rotation);
    beacons.push_back(std::move(j));
  }
  Json robot = Json();
  if (robot_) {
    robot = *robot_;
    robot["connected"] = robot_connected_;
  }
  Json taken = Json();
  if (engine_.taken_beacon()) taken = *engine_.taken_beacon();
  return Json{{"labels", std::move(labels)},
              {"beacons", std::move(beacons)},
              {"robot", std::move(robot)},
              {"mode", to_string(engine_.mode())},
              {"revision", store_.revision()},
              {"taken_beacon", std::move(taken)},
              {"vad_threshold", opts_.vad.threshold}};
}

Mode Session::mode() const {
  std::lock_guard lock(mutex_);
  return engine_.mode();
}

MetricsReport Session::metrics() const {
  std::lock_guard lock(mutex_);
  MetricsReport r = metrics_.report();
  r.beacon_count = store_.beacons().size();
  return r;
}

StoreSnapshot Session::snapshot() const {
  std::lock_guard lock(mutex_);
  return store_.snapshot();
}

double Session::vad_threshold() const {
  std::lock_guard lock(mutex_);
  return opts_.vad.threshold;
}

Mode Session::set_mode(Mode m) {
  std::lock_guard lock(mutex_);
  const Mode before = engine_.mode();
  const Mode after = engine_.set_mode(m);
  emit(stamp(clock_->now()), EventKind::ModeChange,
       Json{{"mode", to_string(after)}, {"from", to_string(before)}, {"cause", "operator"}});
  return after;
}

MRLabel Session::upsert_label(const std::string& name, const Vec3& location, bool overwrite) {
  std::lock_guard lock(mutex_);
  const std::uint64_t before = store_.revision();
  MRLabel label = store_.upsert_label(name, location, overwrite);
  if (store_.revision() != before) {
    emit(stamp(clock_->now()), EventKind::LabelUpsert,
         Json{{"id", label.id}, {"name", name}, {"location", to_json(location)}, {"overwrite", overwrite}});
    persist();
  }
  return label;
}

CaptureResult Session::capture(const CaptureRequest& req) {
  std::lock_guard lock(mutex_);
  PendingCapture pc;
  pc.text = req.text;
  pc.wav_path = req.wav_path;
  pc.pointer = req.pointer;
  const double first = pc.pointer.empty() ? 0.0 : pc.pointer.front().t;
  const double last = pc.pointer.empty() ? first : pc.pointer.back().t;
  pc.t_start = req.t_start.value_or(std::min(first, req.t_end.value_or(first)));
  pc.t_end = req.t_end.value_or(std::max(last, pc.t_start));
  if (!req.t_end && pc.t_end <= pc.t_start) pc.t_end = pc.t_start + kPointerPeriod;
  if (!(pc.t_start < pc.t_end)) throw RequestError("t_start must be before t_end");

  CaptureWindow probe{Utterance::from_text(pc.t_start, pc.t_end, ""), pc.pointer};
  try {
    probe.validate();
  } catch (const std::invalid_argument& e) {
    throw RequestError(e.what());
  }

  // Client clocks are arbitrary; move the window so it ends now, and keep
  // it after everything already logged.
  double shift = clock_->now() - pc.t_end;
  if (last_ns_) {
    const double floor_t = from_nanos(*last_ns_ + kMinGapNs);
    if (pc.t_start + shift < floor_t) shift = floor_t - pc.t_start;
  }
  pc.t_start += shift;
  pc.t_end += shift;
  for (auto& s : pc.pointer) s.t += shift;
  return capture_locked(pc);
}

CaptureResult Session::capture_at(const PendingCapture& pc) {
  std::lock_guard lock(mutex_);
  return capture_locked(pc);
}

CaptureResult Session::capture_locked(const PendingCapture& pc) {
  const auto wall_start = std::chrono::steady_clock::now();
  if (engine_.mode() == Mode::Off) throw std::logic_error("beacon functions are off");
  if (pc.text.has_value() == pc.wav_path.has_value()) {
    throw RequestError("capture needs exactly one of text or wav_path");
  }
  std::vector<std::uint8_t> wav;
  std::optional<PcmAudio> audio;
  if (pc.wav_path) {
    wav = read_bytes(resolve_media(*pc.wav_path));
    try {
      audio = decode_wav_pcm16(wav);
    } catch (const WavError& e) {
      throw RequestError(e.what());
    }
  }
  {
    CaptureWindow probe{Utterance::from_text(pc.t_start, pc.t_end, ""), pc.pointer};
    try {
      probe.validate();
    } catch (const std::invalid_argument& e) {
      throw RequestError(e.what());
    }
  }

  // Record the capture with strictly increasing stamps.
  const double t_start = stamp(pc.t_start);
  emit(t_start, EventKind::UtteranceStart, Json::object());
  // The payload is logged right after the start so re-stamping a logged
  // capture reproduces the same times.
  const double vad_threshold = pc.vad_threshold.value_or(opts_.vad.threshold);
  Json text_payload = pc.text ? Json{{"text", *pc.text}}
                              : Json{{"wav_path", *pc.wav_path}, {"vad_threshold", vad_threshold}};
  emit(stamp(pc.t_start), EventKind::UtteranceText, std::move(text_payload));
  std::vector<PointerSample> samples;
  samples.reserve(pc.pointer.size());
  for (const PointerSample& s : pc.pointer) {
    const double t = stamp(s.t);
    Json p{{"x", s.p.x}, {"y", s.p.y}};
    if (s.p.z != 0.0) p["z"] = s.p.z;
    emit(t, EventKind::PointerSample, std::move(p));
    samples.push_back({t, s.p});
  }
  const double t_end = stamp(pc.t_end);
  emit(t_end, EventKind::UtteranceEnd, Json::object());

  CaptureWindow window;
  if (pc.text) {
    window.utterance = Utterance::from_text(t_start, t_end, *pc.text);
    window.pointer = std::move(samples);
  } else {
    double a = t_start;
    double b = t_end;
    VadConfig vad = opts_.vad;
    vad.threshold = vad_threshold;
    if (auto span = voiced_span(*audio, vad, t_start)) {
      a = std::max(a, span->first);
      b = std::min(b, span->second);
      if (!(a < b)) {
        a = t_start;
        b = t_end;
      }
    }
    window.utterance = Utterance::from_audio(a, b, std::move(wav));
    for (const auto& s : samples) {
      if (s.t >= a && s.t <= b) window.pointer.push_back(s);
    }
  }

  const Mode before = engine_.mode();
  const std::uint64_t revision_before = store_.revision();
  FusionOutcome outcome = engine_.analyze(window);
  const StageTimings& tm = engine_.last_timings();

  Json payload = outcome_to_json(outcome, before);
  if (is_inference(before)) {
    payload["labels"] = engine_.last_intent().labels;
    payload["label_source"] = to_string(engine_.last_intent().source);
  }
  payload["transcript"] = engine_.last_intent().raw_text;
  payload["timings"] = Json{{"stt_s", tm.stt_s},
                            {"llm_s", tm.llm_s},
                            {"clustering_s", tm.clustering_s},
                            {"total_s", elapsed_since(wall_start)}};

  const double t_out = stamp(clock_->now());
  emit(t_out, EventKind::Outcome, payload);
  if (engine_.mode() != before) {
    emit(stamp(t_out), EventKind::ModeChange,
         Json{{"mode", to_string(engine_.mode())}, {"from", to_string(before)}, {"cause", "outcome"}});
  }
  if (mutates_store(outcome) && store_.revision() != revision_before) persist();

  if (const auto* nav = std::get_if<NavDispatched>(&outcome); nav && goal_sink_) {
    const Pose map_goal = transform_pose(nav->goal, FrameId::World, FrameId::Map, opts_.anchor);
    goal_sink_(bridge::NavGoal{map_goal, fmt::format("{}#{}", nav->beacon_id, ++goal_seq_)});
  }
  return CaptureResult{std::move(outcome), std::move(payload), t_out};
}

double Session::calibrate_rms(std::span<const double> rms, std::optional<double> frame_len) {
  std::lock_guard lock(mutex_);
  double threshold = 0.0;
  try {
    threshold = calibrate_from_rms(rms, frame_len.value_or(opts_.vad.frame_len));
  } catch (const std::invalid_argument& e) {
    throw RequestError(e.what());
  }
  opts_.vad.threshold = threshold;
  return threshold;
}

double Session::calibrate_wav(const std::filesystem::path& path) {
  std::lock_guard lock(mutex_);
  const std::vector<std::uint8_t> bytes = read_bytes(resolve_media(path.string()));
  double threshold = 0.0;
  try {
    const PcmAudio audio = decode_wav_pcm16(bytes);
    VadConfig cfg = opts_.vad;
    cfg.sample_rate = audio.sample_rate;
    const std::vector<AudioFrame> frames = make_frames(audio.samples, cfg);
    threshold = calibrate(frames, cfg);
  } catch (const WavError& e) {
    throw RequestError(e.what());
  } catch (const std::invalid_argument& e) {
    throw RequestError(e.what());
  }
  opts_.vad.threshold = threshold;
  return threshold;
}

void Session::on_robot(const bridge::TfSample& tf, std::optional<bridge::StatusUpdate> status,
                       bool connected) {
  std::lock_guard lock(mutex_);
  robot_connected_ = connected;
  const Pose world = transform_pose(tf.pose, FrameId::Map, FrameId::World, opts_.anchor);
  Json next = pose_payload(world);
  next["status"] = status ? bridge::to_string(status->status) : "Idle";
  next["goal_id"] = status ? status->goal_id : "";
  if (robot_ && *robot_ == next) return;
  robot_ = next;
  emit(stamp(clock_->now()), EventKind::RobotPose, std::move(next));
}

}  // namespace pointspeak::service
