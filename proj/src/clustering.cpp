#include "pointspeak/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pointspeak {

std::vector<Cluster> sequential_cluster(std::span<const PointerSample> points,
                                        const ClusterParams& params) {
  if (!(params.d_th > 0.0) || !std::isfinite(params.d_th)) {
    throw std::invalid_argument("d_th must be a positive finite distance");
  }
  std::vector<Cluster> out;
  if (points.empty()) {
    return out;
  }
  for (const PointerSample& s : points) {
    if (!std::isfinite(s.t) || !is_finite(s.p)) {
      throw std::invalid_argument("pointer samples must be finite");
    }
  }

  Cluster active{points.front().p, 1, points.front().t, points.front().t};
  for (std::size_t i = 1; i < points.size(); ++i) {
    const PointerSample& s = points[i];
    if (s.t < points[i - 1].t) {
      throw std::invalid_argument("pointer samples must be in timestamp order");
    }
    if (planar_distance(s.p, active.centroid) <= params.d_th) {
      const double n = static_cast<double>(active.size);
      const Vec3 sum = active.centroid * n + s.p;
      active.centroid = {sum.x / (n + 1.0), sum.y / (n + 1.0), sum.z / (n + 1.0)};
      active.size += 1;
      active.t_last = s.t;
    } else {
      out.push_back(active);
      active = Cluster{s.p, 1, s.t, s.t};
    }
  }
  out.push_back(active);
  return out;
}

TopClusters top_n_clusters(std::span<const Cluster> clusters, std::size_t n) {
  std::vector<Cluster> ranked(clusters.begin(), clusters.end());
  std::stable_sort(ranked.begin(), ranked.end(), [](const Cluster& a, const Cluster& b) {
    if (a.size != b.size) return a.size > b.size;
    return a.t_first < b.t_first;
  });
  TopClusters result;
  result.shortfall = ranked.size() < n;
  ranked.resize(std::min(n, ranked.size()));
  result.clusters = std::move(ranked);
  return result;
}

std::vector<Cluster> sort_by_time(std::span<const Cluster> clusters) {
  std::vector<Cluster> sorted(clusters.begin(), clusters.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const Cluster& a, const Cluster& b) { return a.t_first < b.t_first; });
  return sorted;
}

}  // namespace pointspeak
