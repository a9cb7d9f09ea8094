#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pointspeak/geometry.hpp"

namespace pointspeak {

// A floor intersection of the operator's pointer at session time t.
struct PointerSample {
  double t = 0.0;
  Vec3 p;
};

struct Cluster {
  Vec3 centroid;
  std::size_t size = 0;
  double t_first = 0.0;
  double t_last = 0.0;

  friend bool operator==(const Cluster&, const Cluster&) = default;
};

struct ClusterParams {
  double d_th = 0.15;  // meters
};

// Single pass over time-ordered samples. A sample joins the active cluster
// when its planar distance to the running centroid is <= d_th; otherwise the
// active cluster is closed and the sample seeds a new one. Output is in
// creation order. Throws std::invalid_argument on decreasing timestamps or a
// non-positive threshold.
std::vector<Cluster> sequential_cluster(std::span<const PointerSample> points,
                                        const ClusterParams& params);

struct TopClusters {
  std::vector<Cluster> clusters;
  bool shortfall = false;  // fewer than n clusters were available
};

// The n largest clusters, ties resolved by earlier t_first.
TopClusters top_n_clusters(std::span<const Cluster> clusters, std::size_t n);

// Stable ascending sort on t_first.
std::vector<Cluster> sort_by_time(std::span<const Cluster> clusters);

}  // namespace pointspeak
