#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "clif/error.hpp"
#include "clif/pfi.hpp"

namespace clif::pfi {

double wasserstein_1d(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw ConfigError("wasserstein_1d: empty sample");
  std::vector<double> xs(a.begin(), a.end());
  std::vector<double> ys(b.begin(), b.end());
  for (double v : xs) {
    if (!std::isfinite(v)) throw DataError("wasserstein_1d: non-finite sample value");
  }
  for (double v : ys) {
    if (!std::isfinite(v)) throw DataError("wasserstein_1d: non-finite sample value");
  }
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end());

  // Between consecutive breakpoints both CDFs are constant: F_a = i/na and
  // F_b = j/nb, so |F_a - F_b| = |i*nb - j*na| / (na*nb) exactly in integers.
  const auto na = static_cast<std::int64_t>(xs.size());
  const auto nb = static_cast<std::int64_t>(ys.size());
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::size_t i = 0;
  std::size_t j = 0;
  double prev = std::min(xs.front(), ys.front());
  double total = 0.0;
  while (i < xs.size() || j < ys.size()) {
    const double next = std::min(i < xs.size() ? xs[i] : inf, j < ys.size() ? ys[j] : inf);
    const std::int64_t gap = static_cast<std::int64_t>(i) * nb - static_cast<std::int64_t>(j) * na;
    if (gap != 0) total += static_cast<double>(gap < 0 ? -gap : gap) * (next - prev);
    while (i < xs.size() && xs[i] == next) ++i;
    while (j < ys.size() && ys[j] == next) ++j;
    prev = next;
  }
  return total / (static_cast<double>(na) * static_cast<double>(nb));
}

}  // namespace clif::pfi
