#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "clif/cluster.hpp"
#include "clif/matrix.hpp"

namespace clif::density {

/// Default neighbourhood size for density scoring.
inline constexpr std::size_t kDefaultNeighbors = 5;

struct ClusterInfo {
  int cluster_id = 0;
  std::vector<std::size_t> member_rows;  // ascending dataset row indices
  std::size_t medoid_row = 0;
  std::size_t size = 0;
  double density = 0.0;  // in (0, 1]
};

/// Position (within `members`) of the member minimising the summed Euclidean
/// distance to all other members; the first such member on ties.
std::size_t medoid(const Matrix& members);

/// 1 / (1 + mean distance from the medoid to its min(k, size-1) nearest
/// fellow members); 1.0 for a singleton.
double cluster_density(const Matrix& members, std::size_t medoid_index, std::size_t k);

/// Density score from a mean neighbour distance.
inline double density_from_mean_distance(double mean_distance) noexcept {
  return 1.0 / (1.0 + mean_distance);
}

/// One ClusterInfo per non-noise cluster, densest first (ties by id).
/// `labels[i]` labels row `rows[i]` of `points`; member_rows and medoid_row
/// are reported as those dataset row indices.
std::vector<ClusterInfo> density_ranking(const cluster::ClusterLabels& labels,
                                         const Matrix& points, std::span<const std::size_t> rows,
                                         std::size_t k = kDefaultNeighbors);

/// Overload for labels covering every row of `points`.
std::vector<ClusterInfo> density_ranking(const cluster::ClusterLabels& labels,
                                         const Matrix& points,
                                         std::size_t k = kDefaultNeighbors);

}  // namespace clif::density
