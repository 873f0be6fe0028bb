#pragma once

// Iterative dense-cluster extraction: cluster the surviving rows, score
// cluster densities, remove clusters at or above the dense threshold, flag
// large clusters in the sparse band, and repeat until nothing is dense.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "clif/cluster.hpp"
#include "clif/density.hpp"
#include "clif/matrix.hpp"

namespace clif::iteration {

struct ClifConfig {
  double dense_threshold = 0.85;
  double sparse_low = 0.65;
  /// When unset: 20 x mean size of the iteration's dense clusters, rounded up.
  std::optional<std::size_t> sparse_min_size;
  std::size_t k_neighbors = density::kDefaultNeighbors;
  std::size_t max_iterations = 50;
  cluster::HdbscanParams clusterer;
  std::uint64_t seed = 0;

  /// Throws ConfigError unless 0 < sparse_low < dense_threshold <= 1,
  /// k_neighbors >= 1, max_iterations >= 1 and the clusterer params are valid.
  void validate() const;
};

/// Multiplier behind the default sparse size floor.
inline constexpr std::size_t kSparseSizeFactor = 20;

struct Partition {
  std::vector<density::ClusterInfo> dense;
  std::vector<density::ClusterInfo> sparse;
  std::size_t sparse_min_size = 0;  // floor actually applied (0 if none applies)
};

/// Splits a density-sorted ranking into dense and sparse clusters.
Partition partition_clusters(std::span<const density::ClusterInfo> ranked, const ClifConfig& cfg);

struct IterationRecord {
  std::size_t iteration = 0;  // 1-based
  std::vector<std::size_t> input_rows;  // rows clustered this iteration
  std::vector<density::ClusterInfo> all_clusters;
  std::vector<density::ClusterInfo> dense_extracted;
  std::vector<density::ClusterInfo> sparse_flagged;
  std::size_t sparse_min_size = 0;
  std::vector<std::size_t> rows_removed;  // ascending dataset row indices
  std::size_t rows_remaining = 0;
};

enum class TerminalReason { no_dense_clusters, too_few_rows, max_iterations };

std::string_view to_string(TerminalReason r) noexcept;

struct ClifResult {
  std::vector<IterationRecord> iterations;
  TerminalReason terminal_reason = TerminalReason::no_dense_clusters;
  std::vector<std::size_t> final_remaining;  // rows never extracted
};

/// Runs the extraction loop on (scaled) feature rows. Every iteration is
/// recorded, including a final one that finds no dense cluster.
ClifResult run_clif(const Matrix& points, const cluster::Clusterer& clusterer,
                    const ClifConfig& cfg);

/// Asserts the per-run invariants (threshold bounds, disjoint removals, row
/// conservation). Throws std::logic_error on violation.
void check_invariants(const ClifResult& result, std::size_t total_rows, const ClifConfig& cfg);

}  // namespace clif::iteration
