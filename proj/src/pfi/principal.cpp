#include <algorithm>
#include <limits>

#include "clif/error.hpp"
#include "clif/pfi.hpp"

namespace clif::pfi {

void PfiThresholds::validate() const {
  if (!(categorical_cut > 0.0 && categorical_cut <= 1.0)) {
    throw ConfigError("categorical cut must lie in (0, 1]");
  }
  if (!(numerical_fraction > 0.0 && numerical_fraction <= 1.0)) {
    throw ConfigError("numerical fraction must lie in (0, 1]");
  }
}

double FeatureSpec::threshold(const PfiThresholds& t) const noexcept {
  if (binary) return t.categorical_cut;
  if (range > 0.0) return t.numerical_fraction * range;
  return std::numeric_limits<double>::infinity();
}

std::vector<FeatureSpec> feature_specs(const tabular::Dataset& raw,
                                       std::span<const std::string> selected) {
  std::vector<std::size_t> cols;
  if (selected.empty()) {
    for (std::size_t c = 0; c < raw.n_cols(); ++c) cols.push_back(c);
  } else {
    for (const auto& name : selected) {
      auto c = raw.column_index(name);
      if (!c) throw ConfigError("selected feature '" + name + "' is not in the dataset");
      cols.push_back(*c);
    }
  }
  std::vector<FeatureSpec> out;
  for (auto c : cols) {
    FeatureSpec spec;
    spec.name = raw.schemas()[c].name;
    spec.column = c;
    spec.binary = raw.schemas()[c].is_binary_indicator();
    if (raw.n_rows() > 0) {
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      for (std::size_t r = 0; r < raw.n_rows(); ++r) {
        const auto* d = std::get_if<double>(&raw.cell(r, c));
        if (d == nullptr) {
          throw DataError("feature '" + spec.name + "' is not numeric in row " + raw.row_ids()[r]);
        }
        lo = std::min(lo, *d);
        hi = std::max(hi, *d);
      }
      spec.range = hi - lo;
    }
    out.push_back(std::move(spec));
  }
  return out;
}

std::vector<PrincipalFeatureFinding> principal_features(const Matrix& raw,
                                                        std::span<const std::size_t> members_a,
                                                        std::span<const std::size_t> members_b,
                                                        std::span<const FeatureSpec> features,
                                                        const PfiThresholds& thresholds) {
  thresholds.validate();
  if (members_a.empty() || members_b.empty()) {
    throw ConfigError("principal_features: empty member set");
  }
  std::vector<double> va(members_a.size());
  std::vector<double> vb(members_b.size());
  std::vector<PrincipalFeatureFinding> out;
  out.reserve(features.size());
  for (const auto& f : features) {
    if (f.column >= raw.cols()) throw ConfigError("feature column out of range");
    for (std::size_t i = 0; i < members_a.size(); ++i) va[i] = raw(members_a[i], f.column);
    for (std::size_t i = 0; i < members_b.size(); ++i) vb[i] = raw(members_b[i], f.column);
    PrincipalFeatureFinding finding;
    finding.feature = f.name;
    finding.distance = wasserstein_1d(va, vb);
    finding.threshold_used = f.threshold(thresholds);
    finding.principal = finding.distance >= finding.threshold_used;
    out.push_back(std::move(finding));
  }
  return out;
}

std::vector<PrincipalFeatureFinding> pfi_report(std::size_t iteration,
                                                std::span<const density::ClusterInfo> clusters,
                                                const Matrix& raw,
                                                std::span<const FeatureSpec> features,
                                                const PfiThresholds& thresholds) {
  std::vector<PrincipalFeatureFinding> out;
  if (clusters.size() < 2) return out;
  std::vector<const density::ClusterInfo*> by_id;
  for (const auto& c : clusters) by_id.push_back(&c);
  std::sort(by_id.begin(), by_id.end(),
            [](const auto* x, const auto* y) { return x->cluster_id < y->cluster_id; });
  for (std::size_t i = 0; i < by_id.size(); ++i) {
    for (std::size_t j = i + 1; j < by_id.size(); ++j) {
      auto findings =
          principal_features(raw, by_id[i]->member_rows, by_id[j]->member_rows, features, thresholds);
      for (auto& f : findings) {
        f.iteration = iteration;
        f.cluster_a = by_id[i]->cluster_id;
        f.cluster_b = by_id[j]->cluster_id;
        out.push_back(std::move(f));
      }
    }
  }
  return out;
}

}  // namespace clif::pfi
