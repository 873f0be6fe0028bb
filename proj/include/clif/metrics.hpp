#pragma once

#include <span>

namespace clif::metrics {

/// Adjusted Rand index between two labelings of the same rows. Every label
/// value, including -1, is treated as an ordinary group. Two identical
/// single-group labelings score 1.
double adjusted_rand_index(std::span<const int> a, std::span<const int> b);

}  // namespace clif::metrics
