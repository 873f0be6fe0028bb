#include <algorithm>
#include <numeric>
#include <random>

#include "clif/error.hpp"
#include "clif/featsel.hpp"
#include "clif/parallel.hpp"
#include "clif/simd.hpp"

namespace clif::featsel {
namespace {

struct Neighbor {
  double dist2;
  std::size_t index;
  bool operator<(const Neighbor& o) const {
    return dist2 != o.dist2 ? dist2 < o.dist2 : index < o.index;
  }
};

std::size_t class_count(std::span<const std::size_t> labels) {
  return labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
}

std::size_t vote(std::vector<Neighbor>& pool, std::size_t k, std::span<const std::size_t> labels,
                 std::vector<std::size_t>& counts) {
  const std::size_t kk = std::min(k, pool.size());
  std::nth_element(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(kk - 1), pool.end());
  std::sort(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(kk));
  std::fill(counts.begin(), counts.end(), 0);
  std::size_t best = 0;
  for (std::size_t i = 0; i < kk; ++i) best = std::max(best, ++counts[labels[pool[i].index]]);
  for (std::size_t i = 0; i < kk; ++i) {
    if (counts[labels[pool[i].index]] == best) return labels[pool[i].index];
  }
  return labels[pool.front().index];
}

double balanced_accuracy(std::span<const std::size_t> truth, std::span<const std::size_t> pred,
                         std::size_t n_classes) {
  std::vector<std::size_t> total(n_classes, 0);
  std::vector<std::size_t> hit(n_classes, 0);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    ++total[truth[i]];
    if (pred[i] == truth[i]) ++hit[truth[i]];
  }
  double sum = 0.0;
  std::size_t present = 0;
  for (std::size_t c = 0; c < n_classes; ++c) {
    if (total[c] == 0) continue;
    sum += static_cast<double>(hit[c]) / static_cast<double>(total[c]);
    ++present;
  }
  return present == 0 ? 0.0 : sum / static_cast<double>(present);
}

// Out-of-fold predictions for the full feature set (variant 0) and for each
// single-column removal (variant 1 + f). Dropping column f subtracts its term
// from the full squared distance.
std::vector<std::vector<std::size_t>> cv_predictions(const Matrix& x,
                                                     std::span<const std::size_t> labels,
                                                     const AblationOptions& opt,
                                                     bool with_removals) {
  const std::size_t n = x.rows();
  const std::size_t dim = x.cols();
  const std::size_t variants = with_removals ? dim + 1 : 1;
  const std::size_t n_classes = class_count(labels);
  const auto fold_of = stratified_folds(labels, opt.folds, opt.seed);
  std::vector<std::vector<std::size_t>> preds(variants, std::vector<std::size_t>(n, 0));

  for (std::size_t fold = 0; fold < opt.folds; ++fold) {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
    for (std::size_t i = 0; i < n; ++i) (fold_of[i] == fold ? test : train).push_back(i);
    if (test.empty() || train.empty()) continue;
    const Matrix train_x = x.select_rows(train);
    std::vector<std::size_t> train_labels(train.size());
    for (std::size_t j = 0; j < train.size(); ++j) train_labels[j] = labels[train[j]];

    parallel_for(test.size(), [&](std::size_t begin, std::size_t end) {
      std::vector<double> full(train.size());
      std::vector<Neighbor> pool(train.size());
      std::vector<std::size_t> counts(n_classes);
      for (std::size_t t = begin; t < end; ++t) {
        const std::size_t row = test[t];
        const auto query = x.row(row);
        simd::squared_distances(query, train_x, full);
        for (std::size_t j = 0; j < train.size(); ++j) pool[j] = {full[j], j};
        preds[0][row] = vote(pool, opt.neighbors, train_labels, counts);
        if (!with_removals) continue;
        for (std::size_t f = 0; f < dim; ++f) {
          const double q = query[f];
          for (std::size_t j = 0; j < train.size(); ++j) {
            const double diff = q - train_x(j, f);
            pool[j] = {std::max(0.0, full[j] - diff * diff), j};
          }
          preds[1 + f][row] = vote(pool, opt.neighbors, train_labels, counts);
        }
      }
    }, 8);
  }
  return preds;
}

void check_options(std::span<const std::size_t> labels, const AblationOptions& opt) {
  if (opt.folds < 2) throw ConfigError("folds must be at least 2");
  if (opt.neighbors < 1) throw ConfigError("neighbors must be at least 1");
  std::vector<std::size_t> sizes(class_count(labels), 0);
  for (auto l : labels) ++sizes[l];
  for (std::size_t c = 0; c < sizes.size(); ++c) {
    if (sizes[c] > 0 && sizes[c] < opt.folds) {
      throw DataError("class " + std::to_string(c) + " has " + std::to_string(sizes[c]) +
                      " rows, fewer than " + std::to_string(opt.folds) +
                      " folds; cannot stratify");
    }
  }
}

}  // namespace

std::vector<std::size_t> stratified_folds(std::span<const std::size_t> labels, std::size_t folds,
                                          std::uint64_t seed) {
  if (folds < 2) throw ConfigError("folds must be at least 2");
  std::vector<std::vector<std::size_t>> by_class(class_count(labels));
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> fold_of(labels.size(), 0);
  for (auto& members : by_class) {
    if (!members.empty() && members.size() < folds) {
      throw DataError("class with " + std::to_string(members.size()) +
                      " rows is too small for " + std::to_string(folds) + " stratified folds");
    }
    std::shuffle(members.begin(), members.end(), rng);
    for (std::size_t i = 0; i < members.size(); ++i) fold_of[members[i]] = i % folds;
  }
  return fold_of;
}

double knn_cv_balanced_accuracy(const Matrix& features, std::span<const std::size_t> labels,
                                const AblationOptions& options) {
  if (labels.size() != features.rows()) throw ConfigError("label count != row count");
  check_options(labels, options);
  const auto preds = cv_predictions(features, labels, options, false);
  return balanced_accuracy(labels, preds[0], class_count(labels));
}

FeatureRanking ablation_rank(const tabular::Dataset& ds, const std::string& target,
                             const AblationOptions& options) {
  const auto view = resolve_target(ds, target);
  check_options(view.labels, options);
  Matrix x(ds.n_rows(), view.feature_cols.size());
  for (std::size_t r = 0; r < ds.n_rows(); ++r) {
    for (std::size_t f = 0; f < view.feature_cols.size(); ++f) {
      const auto* d = std::get_if<double>(&ds.cell(r, view.feature_cols[f]));
      if (d == nullptr) {
        throw DataError("feature '" + view.feature_names[f] + "' is not numeric in row " +
                        ds.row_ids()[r]);
      }
      x(r, f) = *d;
    }
  }
  const auto preds = cv_predictions(x, view.labels, options, true);
  const std::size_t n_classes = view.class_names.size();
  const double baseline = balanced_accuracy(view.labels, preds[0], n_classes);

  std::vector<RankedFeature> scored;
  scored.reserve(view.feature_names.size());
  for (std::size_t f = 0; f < view.feature_names.size(); ++f) {
    scored.push_back(
        {view.feature_names[f], baseline - balanced_accuracy(view.labels, preds[1 + f], n_classes)});
  }
  return FeatureRanking(std::move(scored));
}

}  // namespace clif::featsel
