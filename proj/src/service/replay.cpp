#include "pointspeak/service/replay.hpp"

#include "pointspeak/clock.hpp"
#include "pointspeak/service/session.hpp"

namespace pointspeak::service {
namespace {

std::string mapped(const std::map<std::string, std::string>& ids, const std::string& id) {
  const auto it = ids.find(id);
  return it == ids.end() ? id : it->second;
}

bool same_pose(const Json& a, const Json& b) {
  return a.value("location", Json()) == b.value("location", Json()) &&
         a.value("rotation", Json()) == b.value("rotation", Json());
}

}  // namespace

bool outcomes_equivalent(const Json& rec, const Json& rep, std::map<std::string, std::string>& ids) {
  const std::string type = rec.value("type", "");
  if (type != rep.value("type", "") || rec.value("mode", "") != rep.value("mode", "")) return false;

  if (type == "BeaconsCreated") {
    const Json a = rec.value("beacons", Json::array());
    const Json b = rep.value("beacons", Json::array());
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (!same_pose(a[i], b[i])) return false;
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
      ids[a[i].value("id", "")] = b[i].value("id", "");
    }
    return true;
  }
  if (type == "BeaconMoved") {
    const Json a = rec.value("beacon", Json::object());
    const Json b = rep.value("beacon", Json::object());
    return same_pose(a, b) && mapped(ids, a.value("id", "")) == b.value("id", "");
  }
  if (type == "BeaconTaken" || type == "BeaconDeleted") {
    return mapped(ids, rec.value("id", "")) == rep.value("id", "");
  }
  if (type == "NavDispatched") {
    return same_pose(rec.value("goal", Json::object()), rep.value("goal", Json::object())) &&
           mapped(ids, rec.value("beacon_id", "")) == rep.value("beacon_id", "");
  }
  if (type == "Rejected") return rec.value("reason", "") == rep.value("reason", "");
  return false;
}

ReplayResult replay_log(const SessionLog& log, const AppConfig& cfg, std::unique_ptr<VoiceAnalyzer> voice,
                        const std::optional<std::vector<Pose>>& ground_truth,
                        const std::filesystem::path& media_root) {
  SessionOptions opts;
  opts.fusion = cfg.fusion;
  opts.vad = cfg.vad;
  opts.anchor = cfg.anchor;
  opts.media_root = media_root;

  auto clock = std::make_shared<VirtualClock>(0.0);
  const StoreSnapshot initial = log.header ? log.header->initial : StoreSnapshot{};
  Session session(opts, std::move(voice), clock, seeded_guid_generator(kReplayIdSeed), initial);

  ReplayResult result;
  std::vector<Json> recorded;
  std::optional<PendingCapture> pending;

  const auto& events = log.events;
  for (std::size_t i = 0; i < events.size(); ++i) {
    const SessionEvent& e = events[i];
    clock->sleep_until(e.t);
    try {
      switch (e.kind) {
        case EventKind::ModeChange:
          if (e.payload.value("cause", "operator") == "operator") {
            session.set_mode(*parse_mode(e.payload["mode"].get<std::string>()));
          }
          break;
        case EventKind::LabelUpsert:
          session.upsert_label(e.payload["name"].get<std::string>(),
                               vec3_from_json(e.payload["location"], "location"),
                               e.payload.value("overwrite", false));
          break;
        case EventKind::UtteranceStart:
          pending = PendingCapture{};
          pending->t_start = e.t;
          break;
        case EventKind::PointerSample:
          pending->pointer.push_back(
              {e.t, Vec3{number_field(e.payload, "x"), number_field(e.payload, "y"),
                         e.payload.value("z", 0.0)}});
          break;
        case EventKind::UtteranceText:
          if (e.payload.contains("text")) pending->text = e.payload["text"].get<std::string>();
          if (e.payload.contains("wav_path")) {
            pending->wav_path = e.payload["wav_path"].get<std::string>();
            if (e.payload.contains("vad_threshold")) {
              pending->vad_threshold = number_field(e.payload, "vad_threshold");
            }
          }
          break;
        case EventKind::UtteranceEnd: {
          pending->t_end = e.t;
          // The recorded outcome time stands in for processing latency.
          if (i + 1 < events.size() && events[i + 1].kind == EventKind::Outcome) {
            clock->sleep_until(events[i + 1].t);
          }
          CaptureResult r = session.capture_at(*pending);
          result.outcomes.push_back(std::move(r.payload));
          pending.reset();
          break;
        }
        case EventKind::Outcome:
          recorded.push_back(e.payload);
          break;
        case EventKind::RobotPose:
          break;
      }
    } catch (const SessionLogError&) {
      throw;
    } catch (const std::exception& ex) {
      throw SessionLogError(i, ex.what());
    }
  }

  result.report = session.metrics();
  result.final_store = session.snapshot();
  if (ground_truth) result.report.errors = compute_errors(result.final_store.beacons, *ground_truth);
  if (!recorded.empty()) {
    ReplayCheck check;
    check.recorded = recorded.size();
    check.reproduced = result.outcomes.size();
    std::map<std::string, std::string> ids;
    for (std::size_t k = 0; k < recorded.size(); ++k) {
      if (k >= result.outcomes.size() || !outcomes_equivalent(recorded[k], result.outcomes[k], ids)) {
        check.mismatched.push_back(k);
      }
    }
    result.report.replay = std::move(check);
  }
  return result;
}

MetricsReport replay(const std::filesystem::path& session_file, const AppConfig& cfg,
                     const std::optional<std::filesystem::path>& ground_truth) {
  const SessionLog log = read_session_log(session_file);
  std::optional<std::vector<Pose>> gt;
  if (ground_truth) gt = read_ground_truth(*ground_truth);
  return replay_log(log, cfg, std::make_unique<HttpVoiceAnalyzer>(cfg.backend), gt,
                    session_file.parent_path())
      .report;
}

}  // namespace pointspeak::service
