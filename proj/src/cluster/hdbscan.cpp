#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>

#include "clif/cluster.hpp"
#include "clif/error.hpp"
#include "clif/parallel.hpp"
#include "clif/simd.hpp"

namespace clif::cluster {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<MstEdge> prim_mst(const Matrix& points, std::span<const double> core_sq) {
  const std::size_t n = points.rows();
  const std::size_t dim = points.cols();
  std::vector<MstEdge> edges;
  if (n < 2) return edges;
  edges.reserve(n - 1);
  const auto& k = simd::kernels();

  // Vertices not yet in the tree, kept compact so each scan is one
  // contiguous kernel call; removal swaps the last entry into the hole.
  std::size_t m = n - 1;
  Matrix rem(m, dim);
  std::vector<std::size_t> rem_idx(m);
  std::vector<double> rem_core(m);
  std::vector<double> best(m, kInf);
  std::vector<std::size_t> from(m, n);
  for (std::size_t j = 0; j < m; ++j) {
    rem_idx[j] = j + 1;
    rem_core[j] = core_sq[j + 1];
    std::copy_n(points.row(j + 1).data(), dim, rem.row(j).data());
  }

  std::vector<double> reach(m);
  std::vector<double> cur_point(points.row(0).begin(), points.row(0).end());
  std::size_t cur = 0;
  double cur_core = core_sq[0];

  while (m > 0) {
    k.squared_distances(cur_point.data(), rem.data(), m, dim, reach.data());
    k.max_inplace(reach.data(), rem_core.data(), cur_core, m);

    std::size_t pick = 0;
    for (std::size_t j = 0; j < m; ++j) {
      const double r = reach[j];
      if (r < best[j] || (r == best[j] && cur < from[j])) {
        best[j] = r;
        from[j] = cur;
      }
      if (best[j] < best[pick] || (best[j] == best[pick] && rem_idx[j] < rem_idx[pick])) {
        pick = j;
      }
    }

    const std::size_t v = rem_idx[pick];
    edges.push_back({std::min(v, from[pick]), std::max(v, from[pick]), std::sqrt(best[pick])});
    cur = v;
    cur_core = rem_core[pick];
    std::copy_n(rem.row(pick).data(), dim, cur_point.data());

    const std::size_t last = m - 1;
    if (pick != last) {
      std::copy_n(rem.row(last).data(), dim, rem.row(pick).data());
      rem_idx[pick] = rem_idx[last];
      rem_core[pick] = rem_core[last];
      best[pick] = best[last];
      from[pick] = from[last];
    }
    --m;
  }
  return edges;
}

// Single-linkage merge tree over MST edges. Nodes [0, n) are points; node
// n + i is the i-th merge level. Every edge of equal weight is applied at
// once, so a node may have more than two children; this keeps the tree
// independent of row order when mutual-reachability weights tie.
struct Hierarchy {
  std::size_t n = 0;
  std::vector<std::vector<std::size_t>> kids;
  std::vector<std::size_t> size;
  std::vector<double> weight;

  std::size_t node_size(std::size_t node) const { return node < n ? 1 : size[node - n]; }
  std::size_t root() const { return n + kids.size() - 1; }
};

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t x) {
  std::size_t r = x;
  while (parent[r] != r) r = parent[r];
  while (parent[x] != r) {
    const std::size_t next = parent[x];
    parent[x] = r;
    x = next;
  }
  return r;
}

Hierarchy single_linkage(std::span<const MstEdge> mst, std::size_t n) {
  if (mst.size() + 1 != n) {
    throw ConfigError("MST has " + std::to_string(mst.size()) + " edges; expected " +
                      std::to_string(n - 1));
  }
  std::vector<MstEdge> sorted(mst.begin(), mst.end());
  std::sort(sorted.begin(), sorted.end(), [](const MstEdge& x, const MstEdge& y) {
    if (x.weight != y.weight) return x.weight < y.weight;
    if (x.a != y.a) return x.a < y.a;
    return x.b < y.b;
  });

  Hierarchy h;
  h.n = n;
  // `parent` maps every node to the node that absorbed it; `group` is a
  // scratch union-find over the components touched by one weight level.
  std::vector<std::size_t> parent(2 * n - 1);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  std::vector<std::size_t> group(parent);
  std::vector<std::size_t> touched;
  for (std::size_t lo = 0; lo < sorted.size();) {
    std::size_t hi = lo;
    while (hi < sorted.size() && sorted[hi].weight == sorted[lo].weight) ++hi;
    touched.clear();
    for (std::size_t e = lo; e < hi; ++e) {
      if (sorted[e].a >= n || sorted[e].b >= n) throw ConfigError("MST edge endpoint out of range");
      const std::size_t ra = find_root(group, find_root(parent, sorted[e].a));
      const std::size_t rb = find_root(group, find_root(parent, sorted[e].b));
      if (ra == rb) throw ConfigError("MST edges contain a cycle");
      touched.push_back(find_root(parent, sorted[e].a));
      touched.push_back(find_root(parent, sorted[e].b));
      group[std::max(ra, rb)] = std::min(ra, rb);
    }
    std::sort(touched.begin(), touched.end());
    touched.erase(std::unique(touched.begin(), touched.end()), touched.end());

    // One new node per merged group, children in ascending node order.
    std::vector<std::pair<std::size_t, std::size_t>> by_group;
    by_group.reserve(touched.size());
    for (auto t : touched) by_group.emplace_back(find_root(group, t), t);
    std::sort(by_group.begin(), by_group.end());
    for (std::size_t i = 0; i < by_group.size();) {
      const std::size_t node = n + h.kids.size();
      h.kids.emplace_back();
      h.size.push_back(0);
      h.weight.push_back(sorted[lo].weight);
      std::size_t j = i;
      for (; j < by_group.size() && by_group[j].first == by_group[i].first; ++j) {
        const std::size_t child = by_group[j].second;
        h.kids.back().push_back(child);
        h.size.back() += h.node_size(child);
        parent[child] = node;
      }
      i = j;
    }
    for (auto t : touched) group[t] = t;
    lo = hi;
  }
  return h;
}

// One row of the condensed tree: `child` is a point (child_is_cluster false)
// falling out of `parent` at `lambda`, or a child cluster born at `lambda`.
struct CondensedRow {
  std::size_t parent;
  std::size_t child;
  double lambda;
  std::size_t child_size;
  bool child_is_cluster;
};

struct CondensedTree {
  std::vector<CondensedRow> rows;
  std::size_t cluster_count = 1;  // cluster 0 is the root
};

void collect_leaves(const Hierarchy& h, std::size_t node, std::vector<std::size_t>& out) {
  std::vector<std::size_t> stack{node};
  while (!stack.empty()) {
    const std::size_t x = stack.back();
    stack.pop_back();
    if (x < h.n) {
      out.push_back(x);
    } else {
      const auto& k = h.kids[x - h.n];
      stack.insert(stack.end(), k.rbegin(), k.rend());
    }
  }
}

CondensedTree condense(const Hierarchy& h, std::size_t min_cluster_size) {
  CondensedTree tree;
  std::deque<std::pair<std::size_t, std::size_t>> queue{{h.root(), 0}};
  std::vector<std::size_t> leaves;

  auto fall_out = [&](std::size_t node, std::size_t cluster, double lambda) {
    leaves.clear();
    collect_leaves(h, node, leaves);
    for (auto p : leaves) tree.rows.push_back({cluster, p, lambda, 1, false});
  };

  while (!queue.empty()) {
    auto [node, cluster] = queue.front();
    queue.pop_front();
    if (node < h.n) continue;
    const std::size_t i = node - h.n;
    const double w = h.weight[i];
    const double lambda = w > 0.0 ? 1.0 / w : kInf;
    std::size_t big = 0;
    for (auto k : h.kids[i]) big += h.node_size(k) >= min_cluster_size ? 1 : 0;

    for (auto k : h.kids[i]) {
      if (h.node_size(k) < min_cluster_size) {
        fall_out(k, cluster, lambda);
      } else if (big == 1) {
        queue.emplace_back(k, cluster);
      } else {
        const std::size_t c = tree.cluster_count++;
        tree.rows.push_back({cluster, c, lambda, h.node_size(k), true});
        queue.emplace_back(k, c);
      }
    }
  }

  // Zero-weight merges (coincident points) give lambda = inf; they are
  // treated as merging at the densest finite level in the tree.
  double cap = 0.0;
  for (const auto& row : tree.rows) {
    if (std::isfinite(row.lambda)) cap = std::max(cap, row.lambda);
  }
  if (cap == 0.0) cap = 1.0;
  for (auto& row : tree.rows) {
    if (!std::isfinite(row.lambda)) row.lambda = cap;
  }
  return tree;
}

ClusterLabels extract_eom(const CondensedTree& tree, std::size_t n,
                          std::size_t min_cluster_size) {
  const std::size_t nc = tree.cluster_count;
  std::vector<double> birth(nc, 0.0);
  std::vector<std::vector<std::size_t>> children(nc);
  std::vector<std::vector<std::size_t>> points(nc);
  std::vector<double> point_lambda(n, 0.0);
  for (const auto& row : tree.rows) {
    if (row.child_is_cluster) {
      birth[row.child] = row.lambda;
      children[row.parent].push_back(row.child);
    } else {
      points[row.parent].push_back(row.child);
      point_lambda[row.child] = row.lambda;
    }
  }
  std::vector<double> stability(nc, 0.0);
  for (const auto& row : tree.rows) {
    stability[row.parent] +=
        (row.lambda - birth[row.parent]) * static_cast<double>(row.child_size);
  }

  std::vector<std::vector<std::size_t>> chosen_groups;
  if (nc == 1) {
    // No split ever produced two viable clusters. The root stands as the only
    // candidate; its members are the points that persist to its densest level.
    double top = 0.0;
    for (auto p : points[0]) top = std::max(top, point_lambda[p]);
    std::vector<std::size_t> members;
    for (auto p : points[0]) {
      if (point_lambda[p] >= top) members.push_back(p);
    }
    if (members.size() >= min_cluster_size) chosen_groups.push_back(std::move(members));
  } else {
    // Children always carry larger ids than their parent, so a reverse sweep
    // visits every subtree before its root. Ties favour the parent.
    std::vector<bool> selected(nc, false);
    std::vector<double> subtree(nc, 0.0);
    for (std::size_t c = nc; c-- > 1;) {
      double child_sum = 0.0;
      for (auto ch : children[c]) child_sum += subtree[ch];
      if (stability[c] >= child_sum) {
        selected[c] = true;
        subtree[c] = stability[c];
        std::vector<std::size_t> stack(children[c].begin(), children[c].end());
        while (!stack.empty()) {
          const std::size_t d = stack.back();
          stack.pop_back();
          selected[d] = false;
          stack.insert(stack.end(), children[d].begin(), children[d].end());
        }
      } else {
        subtree[c] = child_sum;
      }
    }
    for (std::size_t c = 1; c < nc; ++c) {
      if (!selected[c]) continue;
      std::vector<std::size_t> members;
      std::vector<std::size_t> stack{c};
      while (!stack.empty()) {
        const std::size_t d = stack.back();
        stack.pop_back();
        members.insert(members.end(), points[d].begin(), points[d].end());
        stack.insert(stack.end(), children[d].begin(), children[d].end());
      }
      chosen_groups.push_back(std::move(members));
    }
  }

  for (auto& g : chosen_groups) std::sort(g.begin(), g.end());
  std::sort(chosen_groups.begin(), chosen_groups.end(),
            [](const auto& x, const auto& y) { return x.front() < y.front(); });
  ClusterLabels out;
  out.labels.assign(n, kNoise);
  for (std::size_t c = 0; c < chosen_groups.size(); ++c) {
    for (auto p : chosen_groups[c]) out.labels[p] = static_cast<int>(c);
  }
  return out;
}

}  // namespace

void HdbscanParams::validate() const {
  if (min_cluster_size < 2) throw ConfigError("min_cluster_size must be at least 2");
  if (min_samples < 1) throw ConfigError("min_samples must be at least 1");
  if (min_samples > min_cluster_size) {
    throw ConfigError("min_samples (" + std::to_string(min_samples) +
                      ") must not exceed min_cluster_size (" + std::to_string(min_cluster_size) +
                      ")");
  }
}

std::vector<double> core_distances_squared(const Matrix& points, std::size_t min_samples) {
  const std::size_t n = points.rows();
  if (min_samples < 1) throw ConfigError("min_samples must be at least 1");
  if (n <= min_samples) {
    throw DataError("core distances need more than min_samples = " + std::to_string(min_samples) +
                    " points; got " + std::to_string(n));
  }
  std::vector<double> core(n, 0.0);
  const auto& k = simd::kernels();
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    std::vector<double> d2(n);
    std::vector<double> nearest(min_samples);
    for (std::size_t i = begin; i < end; ++i) {
      k.squared_distances(points.row(i).data(), points.data(), n, points.cols(), d2.data());
      std::fill(nearest.begin(), nearest.end(), kInf);
      // `nearest` stays sorted ascending; most candidates fail the first test.
      for (std::size_t j = 0; j < n; ++j) {
        const double d = d2[j];
        if (j == i || d >= nearest.back()) continue;
        std::size_t pos = min_samples - 1;
        while (pos > 0 && nearest[pos - 1] > d) {
          nearest[pos] = nearest[pos - 1];
          --pos;
        }
        nearest[pos] = d;
      }
      core[i] = nearest.back();
    }
  });
  return core;
}

std::vector<double> core_distances(const Matrix& points, std::size_t min_samples) {
  auto core = core_distances_squared(points, min_samples);
  simd::kernels().sqrt_inplace(core.data(), core.size());
  return core;
}

std::vector<MstEdge> mutual_reachability_mst(const Matrix& points, std::span<const double> cores) {
  if (cores.size() != points.rows()) throw ConfigError("core distance count != point count");
  std::vector<double> core_sq(cores.size());
  for (std::size_t i = 0; i < cores.size(); ++i) core_sq[i] = cores[i] * cores[i];
  return prim_mst(points, core_sq);
}

ClusterLabels condense_and_extract(std::span<const MstEdge> mst, std::size_t n,
                                   std::size_t min_cluster_size) {
  ClusterLabels out;
  out.labels.assign(n, kNoise);
  if (n < 2 || min_cluster_size > n) return out;
  if (min_cluster_size < 2) throw ConfigError("min_cluster_size must be at least 2");
  const auto hierarchy = single_linkage(mst, n);
  const auto tree = condense(hierarchy, min_cluster_size);
  return extract_eom(tree, n, min_cluster_size);
}

ClusterLabels hdbscan(const Matrix& points, const HdbscanParams& params) {
  params.validate();
  const std::size_t n = points.rows();
  if (n < params.min_cluster_size) return ClusterLabels{std::vector<int>(n, kNoise)};
  // n == min_cluster_size == min_samples leaves too few neighbours; use them all.
  const auto core_sq = core_distances_squared(points, std::min(params.min_samples, n - 1));
  const auto mst = prim_mst(points, core_sq);
  return condense_and_extract(mst, points.rows(), params.min_cluster_size);
}

HdbscanClusterer::HdbscanClusterer(HdbscanParams params) : params_(params) { params_.validate(); }

ClusterLabels HdbscanClusterer::fit(const Matrix& points) const { return hdbscan(points, params_); }

std::size_t HdbscanClusterer::min_rows() const {
  return std::max(params_.min_cluster_size, params_.min_samples + 1);
}

std::string HdbscanClusterer::describe() const {
  return "hdbscan(min_cluster_size=" + std::to_string(params_.min_cluster_size) +
         ", min_samples=" + std::to_string(params_.min_samples) + ", metric=euclidean)";
}

}  // namespace clif::cluster
