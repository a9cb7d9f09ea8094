#include "pointspeak/service/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <tuple>

namespace pointspeak::service {

void LatencyStats::add(double s) {
  ++count;
  total_s += s;
  max_s = std::max(max_s, s);
}

ErrorReport compute_errors(std::span<const MRBeacon> beacons, std::span<const Pose> ground_truth) {
  struct Pair {
    double d;
    std::size_t b;
    std::size_t g;
  };
  std::vector<Pair> pairs;
  pairs.reserve(beacons.size() * ground_truth.size());
  for (std::size_t b = 0; b < beacons.size(); ++b) {
    for (std::size_t g = 0; g < ground_truth.size(); ++g) {
      pairs.push_back({planar_distance(beacons[b].location, ground_truth[g].position), b, g});
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& c) {
    return std::tie(a.d, a.b, a.g) < std::tie(c.d, c.b, c.g);
  });

  std::vector<bool> b_used(beacons.size(), false);
  std::vector<bool> g_used(ground_truth.size(), false);
  ErrorReport out;
  std::vector<std::optional<BeaconError>> by_beacon(beacons.size());
  for (const Pair& p : pairs) {
    if (b_used[p.b] || g_used[p.g]) continue;
    b_used[p.b] = g_used[p.g] = true;
    const double dyaw =
        wrap_angle(quat_to_yaw(beacons[p.b].rotation) - quat_to_yaw(ground_truth[p.g].rotation));
    by_beacon[p.b] = BeaconError{beacons[p.b].id, p.g, p.d, std::abs(dyaw) * 180.0 / std::numbers::pi};
  }
  // Reported in beacon order.
  for (auto& m : by_beacon) {
    if (m) out.matched.push_back(std::move(*m));
  }
  for (std::size_t b = 0; b < beacons.size(); ++b) {
    if (!b_used[b]) out.unmatched_beacons.push_back(beacons[b].id);
  }
  for (std::size_t g = 0; g < ground_truth.size(); ++g) {
    if (!g_used[g]) out.unmatched_ground_truth.push_back(g);
  }
  return out;
}

std::vector<Pose> read_ground_truth(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read ground truth " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  const Json doc = Json::parse(ss.str(), nullptr, false);
  std::vector<Pose> out;
  if (!doc.is_discarded() && doc.is_array()) {
    for (std::size_t i = 0; i < doc.size(); ++i) {
      const Json& e = doc[i];
      try {
        Json loc_json = e.value("location", Json());
        if (loc_json.is_array() && loc_json.size() == 2) loc_json.push_back(0.0);
        const Vec3 loc = vec3_from_json(loc_json, "location");
        if (e.contains("rotation")) {
          out.push_back({loc, quat_from_json(e["rotation"], "rotation")});
        } else {
          out.push_back(make_pose(loc, number_field(e, "yaw")));
        }
      } catch (const JsonFieldError& err) {
        throw std::runtime_error("ground truth entry " + std::to_string(i) + ": " + err.what());
      }
    }
    return out;
  }
  for (const MRBeacon& b : read_beacons_file(path)) out.push_back(b.pose());
  return out;
}

namespace {

Json stats_json(const LatencyStats& s) {
  return Json{{"count", s.count}, {"total_s", s.total_s}, {"max_s", s.max_s}};
}

}  // namespace

Json to_json(const MetricsReport& r, bool include_timings) {
  Json stages = Json::array();
  for (const auto& s : r.stages) {
    stages.push_back(Json{{"start", s.start},
                          {"time_to_beacons", s.time_to_beacons},
                          {"beacons_created", s.beacons_created},
                          {"action_count", s.action_count}});
  }
  Json outcomes = Json::object();
  for (const auto& [k, v] : r.outcomes) outcomes[k] = v;

  Json j{{"time_to_beacons", r.time_to_beacons},
         {"stages", std::move(stages)},
         {"action_count", r.action_count},
         {"capture_count", r.capture_count},
         {"beacon_count", r.beacon_count},
         {"outcomes", std::move(outcomes)},
         {"voice_s", r.voice_s}};

  if (r.errors) {
    Json matched = Json::array();
    for (const auto& m : r.errors->matched) {
      matched.push_back(Json{{"beacon_id", m.beacon_id},
                             {"ground_truth_index", m.ground_truth_index},
                             {"location_m", m.location_m},
                             {"rotation_deg", m.rotation_deg}});
    }
    j["errors"] = Json{{"matched", std::move(matched)},
                       {"unmatched_beacons", r.errors->unmatched_beacons},
                       {"unmatched_ground_truth", r.errors->unmatched_ground_truth}};
  }
  if (r.replay) {
    j["replay"] = Json{{"recorded_outcomes", r.replay->recorded},
                       {"reproduced_outcomes", r.replay->reproduced},
                       {"mismatched", r.replay->mismatched}};
  }
  if (include_timings) {
    j["timings"] = Json{{"intent", stats_json(r.intent)},
                        {"clustering", stats_json(r.clustering)},
                        {"pipeline", stats_json(r.pipeline)}};
  }
  return j;
}

std::string dump_report(const MetricsReport& r, bool include_timings) {
  return dump_json(to_json(r, include_timings));
}

void MetricsAccumulator::observe(const SessionEvent& e) {
  switch (e.kind) {
    case EventKind::ModeChange: {
      if (e.payload.value("cause", "operator") != "operator") break;
      const auto mode = parse_mode(e.payload.value("mode", ""));
      if (!mode) break;
      if (*mode == Mode::Off) {
        stage_open_ = false;
      } else if (!stage_open_) {
        stage_open_ = true;
        report_.stages.push_back({e.t, 0.0, 0, 0});
      }
      break;
    }
    case EventKind::UtteranceStart:
      utterance_start_ = e.t;
      break;
    case EventKind::UtteranceEnd:
      if (utterance_start_) report_.voice_s += e.t - *utterance_start_;
      utterance_start_.reset();
      break;
    case EventKind::Outcome: {
      ++report_.capture_count;
      const std::string type = e.payload.value("type", "");
      std::string key = type;
      if (type == "Rejected") key += ":" + e.payload.value("reason", "");
      ++report_.outcomes[key];

      const auto mode = parse_mode(e.payload.value("mode", ""));
      const bool action = mode && (*mode == Mode::Add || *mode == Mode::EditPlacing);
      if (action) ++report_.action_count;

      std::size_t created = 0;
      if (type == "BeaconsCreated") created = e.payload.value("beacons", Json::array()).size();
      const bool produced = created > 0 || type == "BeaconMoved";
      if (stage_open_ && !report_.stages.empty()) {
        StageReport& s = report_.stages.back();
        if (action) ++s.action_count;
        s.beacons_created += created;
        if (produced) s.time_to_beacons = std::max(0.0, e.t - s.start);
      }

      if (e.payload.contains("timings")) {
        const Json& tm = e.payload["timings"];
        report_.intent.add(tm.value("stt_s", 0.0) + tm.value("llm_s", 0.0));
        report_.clustering.add(tm.value("clustering_s", 0.0));
        report_.pipeline.add(tm.value("total_s", 0.0));
      }
      break;
    }
    default:
      break;
  }
  double total = 0.0;
  for (const auto& s : report_.stages) total += s.time_to_beacons;
  report_.time_to_beacons = total;
}

}  // namespace pointspeak::service
