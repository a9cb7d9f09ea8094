#pragma once

// Independent reference implementations and fixtures shared by the unit
// tests and the acceptance binary. Nothing here calls the code under test
// except where a fixture needs to build inputs for it.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "pointspeak/clustering.hpp"
#include "pointspeak/geometry.hpp"

namespace pointspeak::testing {

// ---- temporary directories -------------------------------------------------

class TempDir {
 public:
  TempDir() {
    std::string tmpl = (std::filesystem::temp_directory_path() / "pointspeak-XXXXXX").string();
    if (!::mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
    path_ = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::filesystem::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << s;
}

// ---- sequential clustering reference ---------------------------------------

struct RefCluster {
  double cx = 0, cy = 0, cz = 0;
  std::size_t n = 0;
  double t_first = 0, t_last = 0;
};

// Step-by-step simulation: the active cluster absorbs a point when the
// planar distance to its centroid is within d_th; the centroid is the
// running mean (c * n + p) / (n + 1).
inline std::vector<RefCluster> ref_sequential_cluster(const std::vector<PointerSample>& pts, double d_th) {
  std::vector<RefCluster> out;
  bool active = false;
  RefCluster cur;
  for (const auto& s : pts) {
    if (active) {
      const double dx = s.p.x - cur.cx;
      const double dy = s.p.y - cur.cy;
      if (std::sqrt(dx * dx + dy * dy) <= d_th) {
        const double n = static_cast<double>(cur.n);
        cur.cx = (cur.cx * n + s.p.x) / (n + 1.0);
        cur.cy = (cur.cy * n + s.p.y) / (n + 1.0);
        cur.cz = (cur.cz * n + s.p.z) / (n + 1.0);
        cur.n += 1;
        cur.t_last = s.t;
        continue;
      }
      out.push_back(cur);
    }
    cur = RefCluster{s.p.x, s.p.y, s.p.z, 1, s.t, s.t};
    active = true;
  }
  if (active) out.push_back(cur);
  return out;
}

// ---- pose calculation brute force -------------------------------------------

struct RefPose {
  double x, y, yaw;
};

// Enumerates every N-subset of clusters and keeps the one whose members all
// beat every non-member (bigger size, then earlier t_first, then earlier
// index). Members are ordered by t_first (index on ties) and paired with the
// labels in order.
inline std::vector<RefPose> brute_force_poses(const std::vector<Cluster>& clusters,
                                              const std::vector<Vec3>& label_locs) {
  const std::size_t n = label_locs.size();
  const std::size_t m = clusters.size();
  if (n > m) return {};
  auto beats = [&](std::size_t a, std::size_t b) {
    if (clusters[a].size != clusters[b].size) return clusters[a].size > clusters[b].size;
    if (clusters[a].t_first != clusters[b].t_first) return clusters[a].t_first < clusters[b].t_first;
    return a < b;
  };
  std::vector<std::size_t> chosen;
  std::vector<bool> mask(m, false);
  std::fill(mask.begin(), mask.begin() + static_cast<std::ptrdiff_t>(n), true);
  // prev_permutation over a sorted-descending mask walks every combination.
  do {
    std::vector<std::size_t> in, out;
    for (std::size_t i = 0; i < m; ++i) (mask[i] ? in : out).push_back(i);
    bool ok = true;
    for (auto a : in) {
      for (auto b : out) {
        if (!beats(a, b)) ok = false;
      }
    }
    if (ok) {
      chosen = in;
      break;
    }
  } while (std::prev_permutation(mask.begin(), mask.end()));

  std::sort(chosen.begin(), chosen.end(), [&](std::size_t a, std::size_t b) {
    if (clusters[a].t_first != clusters[b].t_first) return clusters[a].t_first < clusters[b].t_first;
    return a < b;
  });
  std::vector<RefPose> poses;
  for (std::size_t i = 0; i < chosen.size(); ++i) {
    const Cluster& c = clusters[chosen[i]];
    poses.push_back({c.centroid.x, c.centroid.y,
                     std::atan2(label_locs[i].y - c.centroid.y, label_locs[i].x - c.centroid.x)});
  }
  return poses;
}

// ---- VAD frame simulation ---------------------------------------------------

struct RefVadEvent {
  bool onset;
  double t;
};

// Frame-by-frame energy detector over per-frame RMS values.
inline std::vector<RefVadEvent> ref_vad(const std::vector<double>& rms, double frame_len, double threshold,
                                        int onset_frames, double silence_s, double t0 = 0.0) {
  const int silence_frames = static_cast<int>(std::llround(silence_s / frame_len));
  std::vector<RefVadEvent> ev;
  bool speaking = false;
  int loud = 0, quiet = 0;
  for (std::size_t i = 0; i < rms.size(); ++i) {
    const double t = t0 + static_cast<double>(i) * frame_len;
    if (!speaking) {
      loud = rms[i] > threshold ? loud + 1 : 0;
      if (loud >= onset_frames) {
        speaking = true;
        quiet = 0;
        ev.push_back({true, t});
      }
    } else {
      quiet = rms[i] <= threshold ? quiet + 1 : 0;
      if (quiet >= silence_frames) {
        speaking = false;
        loud = 0;
        ev.push_back({false, t});
      }
    }
  }
  return ev;
}

// Constant-amplitude square wave frame with the requested RMS.
inline std::vector<float> frame_with_rms(double rms, std::size_t n) {
  std::vector<float> f(n);
  for (std::size_t i = 0; i < n; ++i) f[i] = static_cast<float>(i % 2 ? rms : -rms);
  return f;
}

// ---- pointer dwell fixtures -------------------------------------------------

// Samples every `period` seconds, `per_spot` of them around each spot with
// small jitter (well inside d_th).
inline std::vector<PointerSample> dwell_samples(const std::vector<Vec3>& spots, int per_spot, double t0,
                                                std::uint64_t seed = 1, double jitter = 0.01,
                                                double period = 0.1) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> j(-jitter, jitter);
  std::vector<PointerSample> out;
  double t = t0;
  for (const Vec3& s : spots) {
    for (int k = 0; k < per_spot; ++k) {
      out.push_back({t, Vec3{s.x + j(rng), s.y + j(rng), 0.0}});
      t += period;
    }
  }
  return out;
}

// ---- session log fixtures ---------------------------------------------------

inline std::string event_line(double t, const std::string& kind, const std::string& payload) {
  return fmt::format(R"({{"t":{:.9f},"kind":"{}","payload":{}}})", t, kind, payload) + "\n";
}

struct LabelFixture {
  std::string name;
  double x, y;
};

// Six household objects placed around the room.
inline std::vector<LabelFixture> study_labels() {
  return {{"Tissue box", 4.0, 0.0},     {"Chair", 0.0, 4.0},       {"Water bottle", 3.0, 3.0},
          {"Coffee machine", -3.0, 3.0}, {"Flower pot", -3.0, -3.0}, {"Television", 3.0, -3.0}};
}

// One Add utterance naming three labels while the pointer dwells at three
// spots: the multi-beacon Add flow.
inline std::string three_beacon_session(const std::vector<Vec3>& spots) {
  std::string log;
  double t = 0.5;
  for (const auto& l : study_labels()) {
    log += event_line(t, "LabelUpsert",
                      fmt::format(R"({{"name":"{}","location":[{},{},0]}})", l.name, l.x, l.y));
    t += 0.1;
  }
  log += event_line(2.0, "ModeChange", R"({"mode":"Add","cause":"operator"})");
  log += event_line(3.0, "UtteranceStart", "{}");
  log += event_line(3.000001, "UtteranceText",
                    R"({"text":"Place an object here facing the water bottle, here facing the coffee machine, and here facing the flower pot"})");
  const auto samples = dwell_samples(spots, 10, 3.05, 42);
  for (const auto& s : samples) {
    log += event_line(s.t, "PointerSample", fmt::format(R"({{"x":{:.17g},"y":{:.17g}}})", s.p.x, s.p.y));
  }
  const double t_end = samples.back().t + 0.05;
  log += event_line(t_end, "UtteranceEnd", "{}");
  log += event_line(t_end + 1.5, "ModeChange", R"({"mode":"Off","cause":"operator"})");
  return log;
}

}  // namespace pointspeak::testing
