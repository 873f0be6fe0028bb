#pragma once

// Filter-style feature selection: one-way ANOVA F scores, k-NN ablation
// scores, and the rule that merges the two rankings.

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "clif/tabular.hpp"

namespace clif::featsel {

/// Score used when within-group variance is zero but group means differ.
inline constexpr double kInfiniteF = std::numeric_limits<double>::infinity();

struct RankedFeature {
  std::string name;
  double score = 0.0;
};

/// Features sorted by score descending, then name ascending.
class FeatureRanking {
 public:
  FeatureRanking() = default;
  /// Sorts the entries. Throws ConfigError on NaN scores or duplicate names.
  explicit FeatureRanking(std::vector<RankedFeature> entries);

  const std::vector<RankedFeature>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  std::vector<std::string> top(std::size_t k) const;
  /// 0-based rank of a feature; throws ConfigError if absent.
  std::size_t rank_of(const std::string& name) const;

 private:
  std::vector<RankedFeature> entries_;
};

enum class SelectionSource { both, anova_fill };

std::string_view to_string(SelectionSource s) noexcept;

struct SelectedFeature {
  std::string name;
  SelectionSource source = SelectionSource::both;
};

struct SelectionResult {
  std::vector<SelectedFeature> selected;  // ordered by ANOVA rank
  std::vector<std::string> names() const;
};

/// One-way ANOVA F = MSB / MSW. Returns 0 when MSB is 0 and kInfiniteF when
/// MSW is 0 but MSB is positive.
double anova_f(std::span<const std::vector<double>> groups);

/// Row labels and feature columns for a supervised target.
///
/// `target` may name a column of `ds` (its values are class labels) or an
/// original categorical column that was one-hot encoded, in which case the
/// `<target>=<value>` indicator block provides the labels. Either way all
/// target columns are excluded from the feature set.
struct TargetView {
  std::vector<std::size_t> labels;         // class index per row
  std::vector<std::string> class_names;    // class index -> value
  std::vector<std::size_t> feature_cols;   // dataset column indices
  std::vector<std::string> feature_names;
};

TargetView resolve_target(const tabular::Dataset& ds, const std::string& target);

/// ANOVA F of every non-target feature with groups = target classes.
FeatureRanking rank_anova(const tabular::Dataset& ds, const std::string& target);

struct AblationOptions {
  std::size_t folds = 5;
  std::uint64_t seed = 0;
  std::size_t neighbors = 5;
};

/// Stratified cross-validated balanced accuracy of a k-NN majority-vote
/// classifier (Euclidean, k = options.neighbors) predicting `labels` from
/// `features`. Ties in the vote go to the class of the nearest tied
/// neighbour; equal distances order by training row index.
double knn_cv_balanced_accuracy(const Matrix& features, std::span<const std::size_t> labels,
                                const AblationOptions& options);

/// Deterministic stratified fold assignment (fold index per row).
std::vector<std::size_t> stratified_folds(std::span<const std::size_t> labels,
                                          std::size_t folds, std::uint64_t seed);

/// score(f) = baseline accuracy - accuracy without column f.
FeatureRanking ablation_rank(const tabular::Dataset& ds, const std::string& target,
                             const AblationOptions& options = {});

/// Intersection of the two top-k lists, topped up from the ANOVA order.
SelectionResult combine_select(const FeatureRanking& anova, const FeatureRanking& ablation,
                               std::size_t k);

}  // namespace clif::featsel
