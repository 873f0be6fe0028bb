#include <algorithm>
#include <set>

#include "clif/error.hpp"
#include "clif/featsel.hpp"

namespace clif::featsel {

std::string_view to_string(SelectionSource s) noexcept {
  return s == SelectionSource::both ? "both" : "anova_fill";
}

std::vector<std::string> SelectionResult::names() const {
  std::vector<std::string> out;
  out.reserve(selected.size());
  for (const auto& s : selected) out.push_back(s.name);
  return out;
}

SelectionResult combine_select(const FeatureRanking& anova, const FeatureRanking& ablation,
                               std::size_t k) {
  std::set<std::string> universe_a;
  std::set<std::string> universe_b;
  for (const auto& e : anova.entries()) universe_a.insert(e.name);
  for (const auto& e : ablation.entries()) universe_b.insert(e.name);
  if (universe_a != universe_b) {
    throw ConfigError("ANOVA and ablation rankings cover different features");
  }
  if (k > universe_a.size()) {
    throw ConfigError("k = " + std::to_string(k) + " exceeds the " +
                      std::to_string(universe_a.size()) + " available features");
  }

  const auto top_anova = anova.top(k);
  const auto top_ablation = ablation.top(k);
  const std::set<std::string> ablation_set(top_ablation.begin(), top_ablation.end());

  std::set<std::string> agreed;
  for (const auto& name : top_anova) {
    if (ablation_set.contains(name)) agreed.insert(name);
  }

  // Walk the ANOVA order: agreed features keep their tag, the remaining
  // slots go to the best-ranked features not yet chosen.
  SelectionResult result;
  std::size_t fill_slots = k - agreed.size();
  for (const auto& e : anova.entries()) {
    if (result.selected.size() == k) break;
    if (agreed.contains(e.name)) {
      result.selected.push_back({e.name, SelectionSource::both});
    } else if (fill_slots > 0) {
      result.selected.push_back({e.name, SelectionSource::anova_fill});
      --fill_slots;
    }
  }
  return result;
}

}  // namespace clif::featsel
