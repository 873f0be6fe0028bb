#include "clif/density.hpp"

#include <algorithm>
#include <numeric>

#include "clif/error.hpp"
#include "clif/parallel.hpp"
#include "clif/simd.hpp"

namespace clif::density {

std::size_t medoid(const Matrix& members) {
  const std::size_t n = members.rows();
  if (n == 0) throw ConfigError("medoid of an empty cluster");
  std::vector<double> totals(n, 0.0);
  const auto& k = simd::kernels();
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    std::vector<double> d(n);
    for (std::size_t i = begin; i < end; ++i) {
      k.squared_distances(members.row(i).data(), members.data(), n, members.cols(), d.data());
      k.sqrt_inplace(d.data(), n);
      double sum = 0.0;
      for (double x : d) sum += x;
      totals[i] = sum;
    }
  }, 16);
  std::size_t best = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (totals[i] < totals[best]) best = i;
  }
  return best;
}

double cluster_density(const Matrix& members, std::size_t medoid_index, std::size_t k) {
  if (k < 1) throw ConfigError("k must be at least 1");
  const std::size_t n = members.rows();
  if (medoid_index >= n) throw ConfigError("medoid index out of range");
  const std::size_t m = std::min(k, n - 1);
  if (m == 0) return 1.0;

  std::vector<double> d(n);
  simd::squared_distances(members.row(medoid_index), members, d);
  d.erase(d.begin() + static_cast<std::ptrdiff_t>(medoid_index));
  std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(m), d.end());
  simd::kernels().sqrt_inplace(d.data(), m);
  double sum = 0.0;
  for (std::size_t i = 0; i < m; ++i) sum += d[i];
  return density_from_mean_distance(sum / static_cast<double>(m));
}

std::vector<ClusterInfo> density_ranking(const cluster::ClusterLabels& labels,
                                         const Matrix& points, std::span<const std::size_t> rows,
                                         std::size_t k) {
  if (labels.size() != rows.size()) throw ConfigError("label count != row count");
  const auto groups = labels.members();
  std::vector<ClusterInfo> out;
  out.reserve(groups.size());
  for (std::size_t c = 0; c < groups.size(); ++c) {
    if (groups[c].empty()) continue;
    std::vector<std::size_t> dataset_rows;
    dataset_rows.reserve(groups[c].size());
    for (auto i : groups[c]) dataset_rows.push_back(rows[i]);
    const Matrix sub = points.select_rows(dataset_rows);
    const std::size_t med = medoid(sub);

    ClusterInfo info;
    info.cluster_id = static_cast<int>(c);
    info.size = dataset_rows.size();
    info.medoid_row = dataset_rows[med];
    info.density = cluster_density(sub, med, k);
    info.member_rows = std::move(dataset_rows);
    out.push_back(std::move(info));
  }
  std::stable_sort(out.begin(), out.end(), [](const ClusterInfo& a, const ClusterInfo& b) {
    if (a.density != b.density) return a.density > b.density;
    return a.cluster_id < b.cluster_id;
  });
  return out;
}

std::vector<ClusterInfo> density_ranking(const cluster::ClusterLabels& labels,
                                         const Matrix& points, std::size_t k) {
  std::vector<std::size_t> rows(points.rows());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return density_ranking(labels, points, rows, k);
}

}  // namespace clif::density
