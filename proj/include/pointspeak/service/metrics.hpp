#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pointspeak/geometry.hpp"
#include "pointspeak/json_io.hpp"
#include "pointspeak/service/session_log.hpp"
#include "pointspeak/world_store.hpp"

namespace pointspeak::service {

struct BeaconError {
  std::string beacon_id;
  std::size_t ground_truth_index = 0;
  double location_m = 0.0;    // planar distance
  double rotation_deg = 0.0;  // |wrapped yaw difference|, in [0, 180]
};

struct ErrorReport {
  std::vector<BeaconError> matched;
  std::vector<std::string> unmatched_beacons;
  std::vector<std::size_t> unmatched_ground_truth;
};

// Greedy global nearest matching: all (beacon, truth) pairs sorted by planar
// distance, each side used at most once. Leftovers are reported, not dropped.
ErrorReport compute_errors(std::span<const MRBeacon> beacons, std::span<const Pose> ground_truth);

// Either a JSON array of {"location": [x,y,z], "yaw": rad} or
// {"location", "rotation"} objects, or a file in the beacons store format.
std::vector<Pose> read_ground_truth(const std::filesystem::path& path);

// A stage runs from an operator ModeChange out of Off until the next change
// back to Off (or the end of the log).
struct StageReport {
  double start = 0.0;
  double time_to_beacons = 0.0;  // last beacon-producing outcome - start, 0 if none
  std::size_t beacons_created = 0;
  std::size_t action_count = 0;
};

struct LatencyStats {
  std::size_t count = 0;
  double total_s = 0.0;
  double max_s = 0.0;

  void add(double s);
};

struct ReplayCheck {
  std::size_t recorded = 0;
  std::size_t reproduced = 0;
  std::vector<std::size_t> mismatched;  // indices into the recorded outcome list
};

struct MetricsReport {
  std::vector<StageReport> stages;
  double time_to_beacons = 0.0;  // sum over stages
  std::size_t action_count = 0;  // Add and EditPlacing outcomes, rejected ones included
  std::size_t capture_count = 0;
  std::size_t beacon_count = 0;
  std::map<std::string, std::size_t> outcomes;
  double voice_s = 0.0;  // total utterance duration

  // Wall-clock measurements; only serialized on request.
  LatencyStats intent;
  LatencyStats clustering;
  LatencyStats pipeline;

  std::optional<ErrorReport> errors;
  std::optional<ReplayCheck> replay;
};

// Byte-stable for identical inputs unless include_timings is set.
Json to_json(const MetricsReport& r, bool include_timings);
std::string dump_report(const MetricsReport& r, bool include_timings);

// Folds session events into a report.
class MetricsAccumulator {
 public:
  void observe(const SessionEvent& e);
  MetricsReport report() const { return report_; }

 private:
  MetricsReport report_;
  bool stage_open_ = false;
  std::optional<double> utterance_start_;
};

}  // namespace pointspeak::service
