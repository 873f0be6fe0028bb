#pragma once

// Principal feature identification: per-feature 1-D Wasserstein distances
// between cluster pairs, flagged against unit-aware thresholds.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "clif/density.hpp"
#include "clif/matrix.hpp"
#include "clif/tabular.hpp"

namespace clif::pfi {

struct PfiThresholds {
  /// Cut for binary indicator features (1.0 = fully opposing values).
  double categorical_cut = 1.0;
  /// Cut for numerical features, as a fraction of the feature's full range.
  double numerical_fraction = 0.10;

  void validate() const;
};

/// A feature compared between clusters: its column in the raw matrix, kind
/// and full-dataset range (max - min) in raw units.
struct FeatureSpec {
  std::string name;
  std::size_t column = 0;
  bool binary = false;
  double range = 0.0;

  /// Threshold this feature is held to. A numerical feature that is constant
  /// over the dataset gets +inf (it can never separate clusters).
  double threshold(const PfiThresholds& t) const noexcept;
};

/// Specs for `selected` columns of the unscaled dataset (all columns when
/// `selected` is empty). Throws ConfigError for unknown names.
std::vector<FeatureSpec> feature_specs(const tabular::Dataset& raw,
                                       std::span<const std::string> selected = {});

struct PrincipalFeatureFinding {
  std::size_t iteration = 0;
  int cluster_a = 0;
  int cluster_b = 0;
  std::string feature;
  double distance = 0.0;
  double threshold_used = 0.0;
  bool principal = false;
};

/// Exact W1 between the empirical distributions of `a` and `b` (each sample
/// weighted 1/n), integrating |F_a - F_b| over the merged breakpoints.
double wasserstein_1d(std::span<const double> a, std::span<const double> b);

/// One finding per feature for the rows in `members_a` vs `members_b`.
/// `raw` holds unscaled values; iteration and cluster ids are left at 0.
std::vector<PrincipalFeatureFinding> principal_features(const Matrix& raw,
                                                        std::span<const std::size_t> members_a,
                                                        std::span<const std::size_t> members_b,
                                                        std::span<const FeatureSpec> features,
                                                        const PfiThresholds& thresholds);

/// Findings for every unordered pair of `clusters` (ordered by id) times
/// every feature (in `features` order). Fewer than two clusters -> empty.
std::vector<PrincipalFeatureFinding> pfi_report(std::size_t iteration,
                                                std::span<const density::ClusterInfo> clusters,
                                                const Matrix& raw,
                                                std::span<const FeatureSpec> features,
                                                const PfiThresholds& thresholds);

}  // namespace clif::pfi
