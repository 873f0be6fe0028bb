#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "clif/error.hpp"
#include "clif/iteration.hpp"

namespace clif::iteration {

void ClifConfig::validate() const {
  if (!(dense_threshold > 0.0 && dense_threshold <= 1.0)) {
    throw ConfigError("dense threshold must lie in (0, 1]");
  }
  if (!(sparse_low > 0.0 && sparse_low < dense_threshold)) {
    throw ConfigError("sparse low bound must satisfy 0 < sparse_low < dense_threshold");
  }
  if (k_neighbors < 1) throw ConfigError("k_neighbors must be at least 1");
  if (max_iterations < 1) throw ConfigError("max_iterations must be at least 1");
  clusterer.validate();
}

std::string_view to_string(TerminalReason r) noexcept {
  switch (r) {
    case TerminalReason::no_dense_clusters:
      return "no_dense_clusters";
    case TerminalReason::too_few_rows:
      return "too_few_rows";
    case TerminalReason::max_iterations:
      return "max_iterations";
  }
  return "unknown";
}

Partition partition_clusters(std::span<const density::ClusterInfo> ranked,
                             const ClifConfig& cfg) {
  Partition out;
  std::size_t dense_total = 0;
  for (const auto& c : ranked) {
    if (c.density >= cfg.dense_threshold) {
      out.dense.push_back(c);
      dense_total += c.size;
    }
  }
  if (cfg.sparse_min_size) {
    out.sparse_min_size = *cfg.sparse_min_size;
  } else if (!out.dense.empty()) {
    const std::size_t count = out.dense.size();
    out.sparse_min_size = (kSparseSizeFactor * dense_total + count - 1) / count;
  } else {
    return out;
  }
  for (const auto& c : ranked) {
    if (c.density >= cfg.sparse_low && c.density < cfg.dense_threshold &&
        c.size >= out.sparse_min_size) {
      out.sparse.push_back(c);
    }
  }
  return out;
}

ClifResult run_clif(const Matrix& points, const cluster::Clusterer& clusterer,
                    const ClifConfig& cfg) {
  cfg.validate();
  if (points.rows() == 0) throw DataError("cannot run on an empty dataset");

  ClifResult result;
  std::vector<std::size_t> remaining(points.rows());
  std::iota(remaining.begin(), remaining.end(), std::size_t{0});

  for (std::size_t it = 1;; ++it) {
    if (remaining.size() < clusterer.min_rows()) {
      result.terminal_reason = TerminalReason::too_few_rows;
      break;
    }
    if (it > cfg.max_iterations) {
      result.terminal_reason = TerminalReason::max_iterations;
      break;
    }

    const Matrix subset = points.select_rows(remaining);
    const auto labels = clusterer.fit(subset);
    cluster::validate_labels(labels, clusterer.min_cluster_size());
    auto ranked = density::density_ranking(labels, points, remaining, cfg.k_neighbors);
    auto part = partition_clusters(ranked, cfg);

    IterationRecord rec;
    rec.iteration = it;
    rec.input_rows = remaining;
    rec.sparse_min_size = part.sparse_min_size;
    for (const auto& c : part.dense) {
      rec.rows_removed.insert(rec.rows_removed.end(), c.member_rows.begin(), c.member_rows.end());
    }
    std::sort(rec.rows_removed.begin(), rec.rows_removed.end());

    std::vector<std::size_t> survivors;
    survivors.reserve(remaining.size() - rec.rows_removed.size());
    std::set_difference(remaining.begin(), remaining.end(), rec.rows_removed.begin(),
                        rec.rows_removed.end(), std::back_inserter(survivors));
    remaining = std::move(survivors);
    rec.rows_remaining = remaining.size();

    const bool done = part.dense.empty();
    rec.all_clusters = std::move(ranked);
    rec.dense_extracted = std::move(part.dense);
    rec.sparse_flagged = std::move(part.sparse);
    result.iterations.push_back(std::move(rec));
    if (done) {
      result.terminal_reason = TerminalReason::no_dense_clusters;
      break;
    }
  }
  result.final_remaining = std::move(remaining);
  return result;
}

void check_invariants(const ClifResult& result, std::size_t total_rows, const ClifConfig& cfg) {
  auto fail = [](const std::string& what) { throw std::logic_error("CLIF invariant: " + what); };
  std::vector<bool> removed(total_rows, false);
  std::size_t expected_remaining = total_rows;
  for (const auto& rec : result.iterations) {
    std::vector<std::size_t> union_rows;
    for (const auto& c : rec.dense_extracted) {
      if (c.density < cfg.dense_threshold) fail("dense cluster below threshold");
      union_rows.insert(union_rows.end(), c.member_rows.begin(), c.member_rows.end());
    }
    std::sort(union_rows.begin(), union_rows.end());
    if (std::adjacent_find(union_rows.begin(), union_rows.end()) != union_rows.end()) {
      fail("row in two dense clusters of one iteration");
    }
    if (union_rows != rec.rows_removed) fail("rows_removed differs from dense members");
    for (const auto& c : rec.sparse_flagged) {
      if (c.density < cfg.sparse_low || c.density >= cfg.dense_threshold) {
        fail("sparse cluster outside the sparse band");
      }
      if (c.size < rec.sparse_min_size) fail("sparse cluster below size floor");
    }
    for (auto r : rec.rows_removed) {
      if (r >= total_rows) fail("row index out of range");
      if (removed[r]) fail("row removed twice");
      removed[r] = true;
    }
    if (rec.rows_removed.size() > expected_remaining) fail("removed more rows than remained");
    expected_remaining -= rec.rows_removed.size();
    if (rec.rows_remaining != expected_remaining) fail("rows_remaining bookkeeping");
  }
  for (auto r : result.final_remaining) {
    if (r >= total_rows || removed[r]) fail("final remaining row was removed");
    removed[r] = true;
  }
  if (std::find(removed.begin(), removed.end(), false) != removed.end()) {
    fail("row set not conserved");
  }
}

}  // namespace clif::iteration
