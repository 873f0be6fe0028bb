#pragma once

// Clusterer contract and an exact HDBSCAN: core distances, mutual-reachability
// minimum spanning tree (Prim over the implicit complete graph), condensed
// tree and excess-of-mass cluster selection.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "clif/matrix.hpp"

namespace clif::cluster {

inline constexpr int kNoise = -1;

/// Per-row cluster labels; kNoise for noise, clusters numbered 0..k-1.
struct ClusterLabels {
  std::vector<int> labels;

  std::size_t size() const noexcept { return labels.size(); }
  std::size_t cluster_count() const noexcept;
  std::size_t noise_count() const noexcept;
  /// Member row indices of each cluster, ascending.
  std::vector<std::vector<std::size_t>> members() const;
};

/// Throws ConfigError when labels are non-contiguous or a cluster is smaller
/// than min_cluster_size.
void validate_labels(const ClusterLabels& labels, std::size_t min_cluster_size);

/// Any algorithm mapping a feature matrix to labels. Implementations must
/// satisfy validate_labels(result, min_cluster_size()).
class Clusterer {
 public:
  virtual ~Clusterer() = default;
  virtual ClusterLabels fit(const Matrix& points) const = 0;
  /// Smallest dataset the algorithm accepts.
  virtual std::size_t min_rows() const = 0;
  virtual std::size_t min_cluster_size() const = 0;
  virtual std::string describe() const = 0;
};

struct HdbscanParams {
  std::size_t min_cluster_size = 5;
  std::size_t min_samples = 5;

  /// Throws ConfigError unless 2 <= min_cluster_size and
  /// 1 <= min_samples <= min_cluster_size.
  void validate() const;
};

struct MstEdge {
  std::size_t a = 0;  // a < b
  std::size_t b = 0;
  double weight = 0.0;
};

/// Squared distance to the min_samples-th nearest other point, per row.
std::vector<double> core_distances_squared(const Matrix& points, std::size_t min_samples);

/// Distance to the min_samples-th nearest other point (self excluded).
std::vector<double> core_distances(const Matrix& points, std::size_t min_samples);

/// MST under max(core(a), core(b), d(a,b)), built by Prim's algorithm from
/// vertex 0. Among equal candidate weights the lower vertex index joins
/// first and keeps the lower-index parent. `cores` are plain (not squared)
/// core distances.
std::vector<MstEdge> mutual_reachability_mst(const Matrix& points, std::span<const double> cores);

/// Single-linkage hierarchy -> condensed tree -> excess-of-mass selection.
/// Cluster ids follow the order of each cluster's first member row.
ClusterLabels condense_and_extract(std::span<const MstEdge> mst, std::size_t n,
                                   std::size_t min_cluster_size);

ClusterLabels hdbscan(const Matrix& points, const HdbscanParams& params);

class HdbscanClusterer final : public Clusterer {
 public:
  explicit HdbscanClusterer(HdbscanParams params);
  ClusterLabels fit(const Matrix& points) const override;
  std::size_t min_rows() const override;
  std::size_t min_cluster_size() const override { return params_.min_cluster_size; }
  std::string describe() const override;
  const HdbscanParams& params() const noexcept { return params_; }

 private:
  HdbscanParams params_;
};

}  // namespace clif::cluster
