#include <algorithm>

#include "clif/cluster.hpp"
#include "clif/error.hpp"

namespace clif::cluster {

std::size_t ClusterLabels::cluster_count() const noexcept {
  int top = kNoise;
  for (int l : labels) top = std::max(top, l);
  return static_cast<std::size_t>(top + 1);
}

std::size_t ClusterLabels::noise_count() const noexcept {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), kNoise));
}

std::vector<std::vector<std::size_t>> ClusterLabels::members() const {
  std::vector<std::vector<std::size_t>> out(cluster_count());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != kNoise) out[static_cast<std::size_t>(labels[i])].push_back(i);
  }
  return out;
}

void validate_labels(const ClusterLabels& labels, std::size_t min_cluster_size) {
  for (int l : labels.labels) {
    if (l < kNoise) throw ConfigError("label " + std::to_string(l) + " is below the noise label");
  }
  const auto groups = labels.members();
  for (std::size_t c = 0; c < groups.size(); ++c) {
    if (groups[c].empty()) {
      throw ConfigError("cluster ids are not contiguous: cluster " + std::to_string(c) +
                        " is empty");
    }
    if (groups[c].size() < min_cluster_size) {
      throw ConfigError("cluster " + std::to_string(c) + " has " +
                        std::to_string(groups[c].size()) + " members, below the minimum of " +
                        std::to_string(min_cluster_size));
    }
  }
}

}  // namespace clif::cluster
