#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <unordered_set>

#include "clif/error.hpp"
#include "clif/featsel.hpp"

namespace clif::featsel {
namespace {

bool ranks_before(const RankedFeature& a, const RankedFeature& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.name < b.name;
}

std::string label_text(const tabular::Cell& cell) {
  if (const auto* s = std::get_if<std::string>(&cell)) return *s;
  if (const auto* d = std::get_if<double>(&cell)) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), *d);
    (void)ec;
    return std::string(buf, ptr);
  }
  return {};
}

bool belongs_to_target(const tabular::ColumnSchema& s, const std::string& target) {
  if (s.name == target) return true;
  if (s.derived_from) return *s.derived_from == target;
  return s.name.size() > target.size() && s.name.compare(0, target.size(), target) == 0 &&
         s.name[target.size()] == '=';
}

}  // namespace

FeatureRanking::FeatureRanking(std::vector<RankedFeature> entries) : entries_(std::move(entries)) {
  std::unordered_set<std::string> names;
  for (const auto& e : entries_) {
    if (std::isnan(e.score)) throw ConfigError("feature '" + e.name + "' has a NaN score");
    if (!names.insert(e.name).second) throw ConfigError("duplicate feature '" + e.name + "'");
  }
  std::sort(entries_.begin(), entries_.end(), ranks_before);
}

std::vector<std::string> FeatureRanking::top(std::size_t k) const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < std::min(k, entries_.size()); ++i) out.push_back(entries_[i].name);
  return out;
}

std::size_t FeatureRanking::rank_of(const std::string& name) const {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].name == name) return i;
  }
  throw ConfigError("feature '" + name + "' not in ranking");
}

double anova_f(std::span<const std::vector<double>> groups) {
  if (groups.size() < 2) throw ConfigError("anova_f needs at least 2 groups");
  std::size_t total = 0;
  double grand_sum = 0.0;
  std::vector<double> means;
  means.reserve(groups.size());
  for (const auto& g : groups) {
    if (g.empty()) throw ConfigError("anova_f: empty group");
    double s = 0.0;
    for (double x : g) s += x;
    grand_sum += s;
    total += g.size();
    means.push_back(s / static_cast<double>(g.size()));
  }
  const std::size_t k = groups.size();
  if (total <= k) throw ConfigError("anova_f: no within-group degrees of freedom (N <= groups)");

  if (std::all_of(means.begin(), means.end(), [&](double m) { return m == means.front(); })) {
    return 0.0;
  }
  const double grand_mean = grand_sum / static_cast<double>(total);
  double ssb = 0.0;
  double ssw = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double dm = means[i] - grand_mean;
    ssb += static_cast<double>(groups[i].size()) * dm * dm;
    for (double x : groups[i]) {
      const double dx = x - means[i];
      ssw += dx * dx;
    }
  }
  if (ssb == 0.0) return 0.0;
  if (ssw == 0.0) return kInfiniteF;
  const double msb = ssb / static_cast<double>(k - 1);
  const double msw = ssw / static_cast<double>(total - k);
  return msb / msw;
}

TargetView resolve_target(const tabular::Dataset& ds, const std::string& target) {
  TargetView view;
  std::vector<std::string> raw_labels(ds.n_rows());

  if (auto col = ds.column_index(target)) {
    for (std::size_t r = 0; r < ds.n_rows(); ++r) {
      if (tabular::is_missing(ds.cell(r, *col))) {
        throw DataError("target '" + target + "' is missing in row " + ds.row_ids()[r]);
      }
      raw_labels[r] = label_text(ds.cell(r, *col));
    }
  } else {
    std::vector<std::size_t> block;
    for (std::size_t c = 0; c < ds.n_cols(); ++c) {
      if (belongs_to_target(ds.schemas()[c], target)) block.push_back(c);
    }
    if (block.empty()) throw ConfigError("unknown target column '" + target + "'");
    for (std::size_t r = 0; r < ds.n_rows(); ++r) {
      std::optional<std::size_t> hot;
      for (auto c : block) {
        const auto* d = std::get_if<double>(&ds.cell(r, c));
        if (d != nullptr && *d == 1.0) {
          hot = c;
          break;
        }
      }
      if (!hot) {
        throw DataError("target '" + target + "': no indicator set in row " + ds.row_ids()[r]);
      }
      raw_labels[r] = ds.schemas()[*hot].name.substr(target.size() + 1);
    }
  }

  std::map<std::string, std::size_t> classes;
  for (const auto& l : raw_labels) classes.emplace(l, 0);
  std::size_t next = 0;
  for (auto& [name, idx] : classes) {
    idx = next++;
    view.class_names.push_back(name);
  }
  if (classes.size() < 2) {
    throw DataError("target '" + target + "' has fewer than 2 distinct values");
  }
  view.labels.reserve(raw_labels.size());
  for (const auto& l : raw_labels) view.labels.push_back(classes.at(l));

  for (std::size_t c = 0; c < ds.n_cols(); ++c) {
    if (belongs_to_target(ds.schemas()[c], target)) continue;
    view.feature_cols.push_back(c);
    view.feature_names.push_back(ds.schemas()[c].name);
  }
  return view;
}

FeatureRanking rank_anova(const tabular::Dataset& ds, const std::string& target) {
  const auto view = resolve_target(ds, target);
  std::vector<RankedFeature> scored;
  std::vector<std::vector<double>> groups(view.class_names.size());
  for (std::size_t f = 0; f < view.feature_cols.size(); ++f) {
    for (auto& g : groups) g.clear();
    for (std::size_t r = 0; r < ds.n_rows(); ++r) {
      const auto* d = std::get_if<double>(&ds.cell(r, view.feature_cols[f]));
      if (d == nullptr) {
        throw DataError("feature '" + view.feature_names[f] + "' is not numeric in row " +
                        ds.row_ids()[r]);
      }
      groups[view.labels[r]].push_back(*d);
    }
    scored.push_back({view.feature_names[f], anova_f(groups)});
  }
  return FeatureRanking(std::move(scored));
}

}  // namespace clif::featsel
