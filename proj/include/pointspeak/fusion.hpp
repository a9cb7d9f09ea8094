#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "pointspeak/clustering.hpp"
#include "pointspeak/geometry.hpp"
#include "pointspeak/intent.hpp"
#include "pointspeak/world_store.hpp"

namespace pointspeak {

enum class Mode { Off, Add, EditSelecting, EditPlacing, Go, Delete };

const char* to_string(Mode m);
// Accepts the enum spellings and the menu names "add", "edit", "go",
// "delete", "off" (case-insensitive). "edit" selects EditSelecting.
std::optional<Mode> parse_mode(std::string_view s);
// Add and EditPlacing need voice labels and pointer clusters together.
bool is_inference(Mode m);

inline constexpr double kPointerPeriod = 0.1;
inline constexpr double kPointerJitter = 0.02;

// Utterance plus the pointer samples taken while it was spoken.
struct CaptureWindow {
  Utterance utterance;
  std::vector<PointerSample> pointer;

  // Throws std::invalid_argument unless samples are time-ordered and lie
  // within [t_start, t_end].
  void validate() const;
  // True when consecutive samples are kPointerPeriod apart within kPointerJitter.
  bool sampling_regular() const;
};

enum class RejectReason {
  NoPointerData,
  NoLabels,
  ClusterShortfall,
  NoBeaconHit,
  LabelNotFound,
  KeywordMismatch,
};

const char* to_string(RejectReason r);

struct BeaconsCreated {
  std::vector<MRBeacon> beacons;
};
struct BeaconMoved {
  MRBeacon beacon;
};
struct BeaconTaken {
  std::string id;
};
struct NavDispatched {
  Pose goal;  // World frame
  std::string beacon_id;
};
struct BeaconDeleted {
  std::string id;
};
struct Rejected {
  RejectReason reason;
  std::string detail;
};

using FusionOutcome =
    std::variant<BeaconsCreated, BeaconMoved, BeaconTaken, NavDispatched, BeaconDeleted, Rejected>;

const char* outcome_type(const FusionOutcome& o);

class ClusterShortfallError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Beacon poses for an ordered label list. N = label_names.size(); the N
// largest clusters are put in chronological order and the i-th one is
// paired with the i-th label, facing it.
// Throws ClusterShortfallError or NotFoundError.
std::vector<Pose> calculate_poses(std::span<const std::string> label_names,
                                  std::span<const Cluster> clusters, const WorldStore& labels);

struct FusionParams {
  ClusterParams cluster;
  double r_hit = kDefaultHitRadius;

  void validate() const;
};

struct StageTimings {
  double stt_s = 0.0;
  double llm_s = 0.0;
  double clustering_s = 0.0;
  double total_s = 0.0;
};

// Per-operator state machine over capture windows. Mutates the store it is
// given; not thread-safe, callers serialize.
class FusionEngine {
 public:
  FusionEngine(WorldStore& store, VoiceAnalyzer& voice, FusionParams params = {});

  Mode mode() const { return mode_; }
  // EditPlacing is only entered through a successful take.
  Mode set_mode(Mode m);

  // Throws std::logic_error in Off mode and std::invalid_argument for a
  // malformed window. A rejected window leaves the store untouched.
  FusionOutcome analyze(const CaptureWindow& window);
  FusionOutcome take_beacon(const CaptureWindow& window);

  const std::optional<std::string>& taken_beacon() const { return taken_; }
  const StageTimings& last_timings() const { return timings_; }
  const IntentResult& last_intent() const { return intent_; }
  const FusionParams& params() const { return params_; }

 private:
  FusionOutcome analyze_inference(const CaptureWindow& window);
  FusionOutcome analyze_pointer_command(const CaptureWindow& window);

  WorldStore& store_;
  VoiceAnalyzer& voice_;
  FusionParams params_;
  Mode mode_ = Mode::Off;
  std::optional<std::string> taken_;
  StageTimings timings_;
  IntentResult intent_;
};

}  // namespace pointspeak
