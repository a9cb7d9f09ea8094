#include "pointspeak/fusion.hpp"

#include <chrono>
#include <cmath>

#include "pointspeak/text.hpp"

namespace pointspeak {
namespace {

using SteadyClock = std::chrono::steady_clock;

double seconds_since(SteadyClock::time_point start) {
  return std::chrono::duration<double>(SteadyClock::now() - start).count();
}

Keyword expected_keyword(Mode m) {
  switch (m) {
    case Mode::EditSelecting: return Keyword::Take;
    case Mode::Go: return Keyword::Go;
    default: return Keyword::Delete;
  }
}

}  // namespace

const char* to_string(Mode m) {
  switch (m) {
    case Mode::Off: return "Off";
    case Mode::Add: return "Add";
    case Mode::EditSelecting: return "EditSelecting";
    case Mode::EditPlacing: return "EditPlacing";
    case Mode::Go: return "Go";
    case Mode::Delete: return "Delete";
  }
  return "?";
}

std::optional<Mode> parse_mode(std::string_view s) {
  const std::string c = canonical_name(s);
  if (c == "off" || c == "back") return Mode::Off;
  if (c == "add") return Mode::Add;
  if (c == "edit" || c == "editselecting") return Mode::EditSelecting;
  if (c == "editplacing") return Mode::EditPlacing;
  if (c == "go") return Mode::Go;
  if (c == "delete") return Mode::Delete;
  return std::nullopt;
}

bool is_inference(Mode m) { return m == Mode::Add || m == Mode::EditPlacing; }

const char* to_string(RejectReason r) {
  switch (r) {
    case RejectReason::NoPointerData: return "no-pointer-data";
    case RejectReason::NoLabels: return "no-labels";
    case RejectReason::ClusterShortfall: return "cluster-shortfall";
    case RejectReason::NoBeaconHit: return "no-beacon-hit";
    case RejectReason::LabelNotFound: return "label-not-found";
    case RejectReason::KeywordMismatch: return "keyword-mismatch";
  }
  return "?";
}

const char* outcome_type(const FusionOutcome& o) {
  static constexpr const char* names[] = {"BeaconsCreated", "BeaconMoved",   "BeaconTaken",
                                          "NavDispatched",  "BeaconDeleted", "Rejected"};
  return names[o.index()];
}

void CaptureWindow::validate() const {
  utterance.validate();
  for (std::size_t i = 0; i < pointer.size(); ++i) {
    const PointerSample& s = pointer[i];
    if (!std::isfinite(s.t) || !is_finite(s.p)) {
      throw std::invalid_argument("pointer samples must be finite");
    }
    if (i > 0 && s.t < pointer[i - 1].t) {
      throw std::invalid_argument("pointer samples must be in time order");
    }
    if (s.t < utterance.t_start || s.t > utterance.t_end) {
      throw std::invalid_argument("pointer sample lies outside the utterance window");
    }
  }
}

bool CaptureWindow::sampling_regular() const {
  for (std::size_t i = 1; i < pointer.size(); ++i) {
    if (std::abs(pointer[i].t - pointer[i - 1].t - kPointerPeriod) > kPointerJitter + 1e-12) {
      return false;
    }
  }
  return true;
}

std::vector<Pose> calculate_poses(std::span<const std::string> label_names,
                                  std::span<const Cluster> clusters, const WorldStore& labels) {
  const std::size_t n = label_names.size();
  if (n == 0) return {};
  const TopClusters top = top_n_clusters(clusters, n);
  if (top.shortfall) {
    throw ClusterShortfallError("need " + std::to_string(n) + " pointer clusters, found " +
                                std::to_string(clusters.size()));
  }
  const std::vector<Cluster> locations = sort_by_time(top.clusters);

  std::vector<Pose> poses;
  poses.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3& at = locations[i].centroid;
    const MRLabel target = labels.lookup_label(label_names[i]);
    const double yaw = std::atan2(target.location.y - at.y, target.location.x - at.x);
    poses.push_back(make_pose(at, yaw));
  }
  return poses;
}

void FusionParams::validate() const {
  if (!(cluster.d_th > 0.0) || !std::isfinite(cluster.d_th)) {
    throw std::invalid_argument("d_th must be > 0");
  }
  if (!(r_hit > 0.0) || !std::isfinite(r_hit)) throw std::invalid_argument("r_hit must be > 0");
}

FusionEngine::FusionEngine(WorldStore& store, VoiceAnalyzer& voice, FusionParams params)
    : store_(store), voice_(voice), params_(params) {
  params_.validate();
}

Mode FusionEngine::set_mode(Mode m) {
  if (m == Mode::EditPlacing) {
    throw std::invalid_argument("EditPlacing is entered by taking a beacon");
  }
  mode_ = m;
  taken_.reset();
  return mode_;
}

FusionOutcome FusionEngine::analyze(const CaptureWindow& window) {
  if (mode_ == Mode::Off) {
    throw std::logic_error("beacon functions are off");
  }
  window.validate();
  timings_ = {};
  intent_ = {};
  const auto start = SteadyClock::now();
  FusionOutcome out = is_inference(mode_) ? analyze_inference(window)
                                          : analyze_pointer_command(window);
  timings_.total_s = seconds_since(start);
  return out;
}

FusionOutcome FusionEngine::take_beacon(const CaptureWindow& window) {
  if (mode_ != Mode::EditSelecting) {
    throw std::logic_error("take requires EditSelecting mode");
  }
  return analyze(window);
}

FusionOutcome FusionEngine::analyze_inference(const CaptureWindow& window) {
  // Voice and pointer are analyzed independently, then fused.
  intent_ = voice_.interpret(window.utterance, store_.label_names());
  timings_.stt_s = intent_.stt_seconds;
  timings_.llm_s = intent_.llm_seconds;

  const auto cluster_start = SteadyClock::now();
  const std::vector<Cluster> clusters = sequential_cluster(window.pointer, params_.cluster);
  timings_.clustering_s = seconds_since(cluster_start);

  if (window.pointer.empty()) {
    return Rejected{RejectReason::NoPointerData, "no pointer samples in the capture window"};
  }
  if (intent_.labels.empty()) {
    if (!intent_.unresolved.empty()) {
      return Rejected{RejectReason::LabelNotFound, "unknown label '" + intent_.unresolved.front() + "'"};
    }
    return Rejected{RejectReason::NoLabels, "no label named in '" + intent_.raw_text + "'"};
  }

  std::vector<std::string> names = intent_.labels;
  if (mode_ == Mode::EditPlacing) names.resize(1);

  std::vector<Pose> poses;
  try {
    poses = calculate_poses(names, clusters, store_);
  } catch (const ClusterShortfallError& e) {
    return Rejected{RejectReason::ClusterShortfall, e.what()};
  } catch (const NotFoundError& e) {
    return Rejected{RejectReason::LabelNotFound, e.what()};
  }

  if (mode_ == Mode::Add) {
    BeaconsCreated created;
    for (const Pose& p : poses) created.beacons.push_back(store_.add_beacon(p));
    return created;
  }

  const std::string id = taken_.value_or("");
  if (!store_.find_beacon(id)) {
    mode_ = Mode::EditSelecting;
    taken_.reset();
    return Rejected{RejectReason::NoBeaconHit, "the taken beacon no longer exists"};
  }
  BeaconMoved moved{store_.update_beacon(id, poses.front())};
  mode_ = Mode::EditSelecting;
  taken_.reset();
  return moved;
}

FusionOutcome FusionEngine::analyze_pointer_command(const CaptureWindow& window) {
  std::string transcript;
  const auto stt_start = SteadyClock::now();
  try {
    transcript = voice_.transcribe(window.utterance);
  } catch (const std::runtime_error&) {
    transcript.clear();
  }
  if (!window.utterance.is_text()) timings_.stt_s = seconds_since(stt_start);
  intent_.raw_text = transcript;
  intent_.keyword = detect_keyword(transcript);

  if (window.pointer.empty()) {
    return Rejected{RejectReason::NoPointerData, "no pointer samples in the capture window"};
  }
  const Keyword wanted = expected_keyword(mode_);
  if (intent_.keyword != wanted) {
    return Rejected{RejectReason::KeywordMismatch,
                    std::string("expected the '") + to_string(wanted) + "' command"};
  }
  const Vec3 cursor = window.pointer.back().p;
  const std::optional<MRBeacon> hit = store_.hit_test(cursor, params_.r_hit);
  if (!hit) {
    return Rejected{RejectReason::NoBeaconHit, "pointer is not on a beacon"};
  }

  switch (mode_) {
    case Mode::EditSelecting:
      taken_ = hit->id;
      mode_ = Mode::EditPlacing;
      return BeaconTaken{hit->id};
    case Mode::Go:
      return NavDispatched{hit->pose(), hit->id};
    default:
      store_.remove_beacon(hit->id);
      return BeaconDeleted{hit->id};
  }
}

}  // namespace pointspeak
