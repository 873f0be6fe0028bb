#include "clif/metrics.hpp"

#include <map>
#include <utility>

#include "clif/error.hpp"

namespace clif::metrics {
namespace {

double pairs(double n) { return n * (n - 1.0) / 2.0; }

}  // namespace

double adjusted_rand_index(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) throw ConfigError("labelings differ in length");
  std::map<std::pair<int, int>, double> table;
  std::map<int, double> rows;
  std::map<int, double> cols;
  for (std::size_t i = 0; i < a.size(); ++i) {
    table[{a[i], b[i]}] += 1.0;
    rows[a[i]] += 1.0;
    cols[b[i]] += 1.0;
  }
  double index = 0.0;
  for (const auto& [_, n] : table) index += pairs(n);
  double sum_rows = 0.0;
  for (const auto& [_, n] : rows) sum_rows += pairs(n);
  double sum_cols = 0.0;
  for (const auto& [_, n] : cols) sum_cols += pairs(n);
  const double total = pairs(static_cast<double>(a.size()));
  if (total == 0.0) return 1.0;
  const double expected = sum_rows * sum_cols / total;
  const double max_index = 0.5 * (sum_rows + sum_cols);
  if (max_index == expected) return 1.0;
  return (index - expected) / (max_index - expected);
}

}  // namespace clif::metrics
