// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
// criterion fails. Each criterion also reports its wall time against a limit.

#include <fcntl.h>
#include <sys/resource.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "cli_harness.hpp"
#include "clif/cluster.hpp"
#include "clif/density.hpp"
#include "clif/featsel.hpp"
#include "clif/iteration.hpp"
#include "clif/pfi.hpp"
#include "clif/synth.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "planted.hpp"

namespace {

using V = std::vector<double>;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail = what;
    pass = pass && ok;
  }
};

int failures = 0;

void criterion(const std::string& name, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail = std::string("exception: ") + e.what();
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (limit_s > 0 && secs >= limit_s) {
    o.require(false, "runtime " + std::to_string(secs) + " s over the limit");
  }
  if (!o.pass) ++failures;
  std::printf("%s  %-28s %8.2f s", o.pass ? "PASS" : "FAIL", name.c_str(), secs);
  if (limit_s > 0) std::printf(" (limit %.0f s)", limit_s);
  if (!o.detail.empty()) std::printf("  %s", o.detail.c_str());
  std::printf("\n");
  std::fflush(stdout);
}

V random_sample(std::mt19937_64& rng, std::size_t max_n, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  V s(1 + rng() % max_n);
  for (auto& v : s) v = u(rng);
  return s;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

Outcome wasserstein_oracle() {
  Outcome o;
  std::mt19937_64 rng(20240501);
  double worst = 0.0;
  for (int i = 0; i < 500; ++i) {
    const auto a = random_sample(rng, 20, -10, 10);
    const auto b = random_sample(rng, 20, -10, 10);
    const double got = clif::pfi::wasserstein_1d(a, b);
    const double want = oracle::w1_cdf_grid(a, b);
    worst = std::max(worst, std::abs(got - want));
    o.require(std::abs(got - want) <= 1e-9, "oracle mismatch on pair " + std::to_string(i));
    o.require(std::abs(got - clif::pfi::wasserstein_1d(b, a)) <= 1e-9, "asymmetric");
    o.require(got >= 0.0, "negative distance");
    // Zero iff identical distributions: a against a shuffled, doubled copy.
    V twice = a;
    twice.insert(twice.end(), a.rbegin(), a.rend());
    o.require(clif::pfi::wasserstein_1d(a, twice) <= 1e-9, "nonzero on equal distributions");
    if (want > 1e-9) o.require(got > 0.0, "zero on different distributions");
  }
  for (int i = 0; i < 200; ++i) {
    const auto a = random_sample(rng, 20, -10, 10);
    const auto b = random_sample(rng, 20, -10, 10);
    const auto c = random_sample(rng, 20, -10, 10);
    const double ab = clif::pfi::wasserstein_1d(a, b);
    const double via = clif::pfi::wasserstein_1d(a, c) + clif::pfi::wasserstein_1d(c, b);
    o.require(ab <= via + 1e-9, "triangle inequality violated on triple " + std::to_string(i));
  }
  if (o.pass) o.detail = "max |err| " + fmt(worst) + ", 200 triangles ok";
  return o;
}

Outcome wasserstein_binary() {
  Outcome o;
  std::mt19937_64 rng(7);
  double worst = 0.0;
  for (int i = 0; i < 300; ++i) {
    V a(1 + rng() % 40), b(1 + rng() % 40);
    for (auto& v : a) v = static_cast<double>(rng() % 2);
    for (auto& v : b) v = static_cast<double>(rng() % 2);
    const double ma = std::accumulate(a.begin(), a.end(), 0.0) / static_cast<double>(a.size());
    const double mb = std::accumulate(b.begin(), b.end(), 0.0) / static_cast<double>(b.size());
    const double err = std::abs(clif::pfi::wasserstein_1d(a, b) - std::abs(ma - mb));
    worst = std::max(worst, err);
    o.require(err <= 1e-12, "pair " + std::to_string(i) + " off by " + fmt(err));
  }
  if (o.pass) o.detail = "max |err| " + fmt(worst);
  return o;
}

Outcome mst_exactness() {
  Outcome o;
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const std::size_t n = 2 + rng() % 29;
    const std::size_t d = 1 + rng() % 5;
    oracle::Points p(n, V(d));
    for (auto& row : p) {
      for (auto& v : row) v = u(rng);
    }
    const std::size_t k = 1 + rng() % (n - 1);
    const auto m = fixture::matrix(p);
    const auto cores = clif::cluster::core_distances(m, k);
    const auto mst = clif::cluster::mutual_reachability_mst(m, cores);
    double total = 0.0;
    for (const auto& e : mst) total += e.weight;
    const double want = oracle::mst_weight(p, oracle::core_distances(p, k));
    worst = std::max(worst, std::abs(total - want));
    o.require(mst.size() + 1 == n, "not a spanning tree");
    o.require(std::abs(total - want) <= 1e-9, "set " + std::to_string(i) + " off by " +
                                                  fmt(std::abs(total - want)));
  }
  if (o.pass) o.detail = "max |err| " + fmt(worst);
  return o;
}

Outcome hdbscan_recovery() {
  Outcome o;
  double worst = 1.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    clif::synth::BlobSpec spec;
    spec.n_blobs = 3;
    spec.points_per_blob = 60;
    spec.spreads = {0.02};
    spec.center_separation = 1.0;
    spec.seed = seed;
    const auto b = clif::synth::generate_blobs(spec);
    const auto l = clif::cluster::hdbscan(b.points, {10, 10});
    const double ari = oracle::ari_pairs(l.labels, b.truth);
    worst = std::min(worst, ari);
    o.require(l.cluster_count() == 3, "seed " + std::to_string(seed) + ": " +
                                          std::to_string(l.cluster_count()) + " clusters");
    o.require(ari >= 0.99, "seed " + std::to_string(seed) + ": ARI " + fmt(ari));
  }
  if (o.pass) o.detail = "min ARI " + fmt(worst);
  return o;
}

Outcome clif_behaviour() {
  Outcome o;
  std::size_t max_iters = 0;
  double min_share = 1.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const std::size_t blob = 200;
    const auto m = fixture::planted_blob(blob, 800, 8, 0.01, 1000 + seed);
    // Precondition: the planted blob itself scores as dense.
    std::vector<std::size_t> rows(blob);
    std::iota(rows.begin(), rows.end(), 0);
    const auto members = m.select_rows(rows);
    const double d = clif::density::cluster_density(members, clif::density::medoid(members), 5);
    o.require(d >= 0.85, "planted blob density " + fmt(d));

    clif::iteration::ClifConfig cfg;
    cfg.seed = seed;
    const clif::cluster::HdbscanClusterer c(cfg.clusterer);
    const auto r = clif::iteration::run_clif(m, c, cfg);
    clif::iteration::check_invariants(r, m.rows(), cfg);

    std::size_t hit = 0;
    for (const auto& cl : r.iterations.at(0).dense_extracted) {
      for (auto row : cl.member_rows) hit += row < blob ? 1 : 0;
    }
    const double share = static_cast<double>(hit) / static_cast<double>(blob);
    min_share = std::min(min_share, share);
    max_iters = std::max(max_iters, r.iterations.size());
    o.require(share >= 0.95, "seed " + std::to_string(seed) + ": blob share " + fmt(share));
    o.require(r.terminal_reason == clif::iteration::TerminalReason::no_dense_clusters,
              "seed " + std::to_string(seed) + ": terminal " +
                  std::string(clif::iteration::to_string(r.terminal_reason)));
    o.require(r.iterations.size() <= 3,
              "seed " + std::to_string(seed) + ": " + std::to_string(r.iterations.size()) +
                  " iterations");
  }
  if (o.pass) {
    o.detail = "min blob share " + fmt(min_share) + ", max iterations " + std::to_string(max_iters);
  }
  return o;
}

Outcome anova_fixture() {
  Outcome o;
  using G = std::vector<V>;
  const double f = clif::featsel::anova_f(G{{1, 2, 3}, {2, 3, 4}, {3, 4, 5}});
  o.require(std::abs(f - 3.0) <= 1e-9, "fixture F = " + fmt(f));
  o.require(clif::featsel::anova_f(G{{1, 2, 3}, {3, 2, 1}, {2, 2, 2}}) == 0.0,
            "equal means give nonzero F");
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-100.0, 100.0);
  std::uniform_real_distribution<double> s(0.001, 1000.0);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    G g(2 + rng() % 5);
    for (auto& grp : g) {
      grp.resize(2 + rng() % 12);
      for (auto& v : grp) v = u(rng);
    }
    const double base = clif::featsel::anova_f(g);
    const double shift = u(rng);
    const double scale = (rng() % 2 ? 1.0 : -1.0) * s(rng);
    G t = g;
    for (auto& grp : t) {
      for (auto& v : grp) v = scale * v + shift;
    }
    const double rel = std::abs(clif::featsel::anova_f(t) - base) / std::max(1.0, std::abs(base));
    worst = std::max(worst, rel);
    o.require(rel <= 1e-9, "transform " + std::to_string(i) + " moved F by " + fmt(rel));
  }
  if (o.pass) o.detail = "F = " + fmt(f) + ", max rel drift " + fmt(worst);
  return o;
}

Outcome pfi_thresholds() {
  Outcome o;
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < 20; ++i) rows.push_back({1.0, 30.0});
  for (int i = 0; i < 20; ++i) rows.push_back({0.0, 45.0});
  rows.push_back({0.0, 0.0});
  rows.push_back({1.0, 90.0});
  const auto ds = fixture::numeric_dataset({"smoker=yes", "age"}, rows);
  const auto specs = clif::pfi::feature_specs(ds);
  std::vector<std::size_t> a(20), b(20);
  std::iota(a.begin(), a.end(), 0);
  std::iota(b.begin(), b.end(), 20);
  const auto f = clif::pfi::principal_features(ds.to_matrix(), a, b, specs, {});
  o.require(f.size() == 2, "expected two findings");
  if (!o.pass) return o;
  o.require(specs[0].binary && !specs[1].binary, "feature kinds misdetected");
  o.require(f[0].distance == 1.0 && f[0].principal, "binary opposition: " + fmt(f[0].distance));
  o.require(f[1].distance == 15.0, "age distance " + fmt(f[1].distance));
  o.require(std::abs(f[1].threshold_used - 9.0) <= 1e-12, "age threshold " +
                                                               fmt(f[1].threshold_used));
  o.require(f[1].principal, "age not principal");
  if (o.pass) o.detail = "binary 1.0 principal; age 15 >= 9 principal";
  return o;
}

Outcome determinism() {
  Outcome o;
  cli::Scratch s("determinism");
  const auto dir = s.path().string();
  const auto g = s.run({"generate", "--blobs", "4", "--points-per-blob", "150", "--spread",
                        "0.01,0.02,0.05,0.1", "--noise", "600", "--dims", "6", "--seed", "11",
                        "--out-dir", dir});
  o.require(g.exit_code == 0, "generate failed: " + g.err);
  for (const char* out : {"r1", "r2"}) {
    const auto r = s.run({"run", "--input", (s / "data.csv").string(), "--seed", "11",
                          "--pfi-clusters", "all", "--out-dir", (s / out).string()});
    o.require(r.exit_code == 0, std::string("run failed: ") + r.err);
  }
  if (!o.pass) return o;
  std::size_t bytes = 0;
  for (const char* f : {"iterations.csv", "assignments.csv", "principal_features.csv",
                        "density_pattern.csv"}) {
    const auto a = cli::slurp(s / "r1" / f);
    const auto b = cli::slurp(s / "r2" / f);
    o.require(!a.empty() && a == b, std::string(f) + " differs between runs");
    bytes += a.size();
  }
  const auto pf = cli::slurp(s / "r1" / "principal_features.csv");
  o.require(std::count(pf.begin(), pf.end(), '\n') > 1, "no principal feature findings");
  if (o.pass) o.detail = std::to_string(bytes) + " bytes identical";
  return o;
}

// Runs the CLI as a child and reports its wall time and peak RSS.
Outcome scale() {
  Outcome o;
  cli::Scratch s("scale");
  const auto dir = s.path().string();
  const auto g = s.run({"generate", "--blobs", "8", "--points-per-blob", "5000", "--spread",
                        "0.05", "--noise", "10000", "--dims", "12", "--seed", "5", "--out-dir",
                        dir});
  o.require(g.exit_code == 0, "generate failed: " + g.err);
  if (!o.pass) return o;

  const std::string input = (s / "data.csv").string();
  const std::string out = (s / "out").string();
  const auto t0 = std::chrono::steady_clock::now();
  const pid_t pid = ::fork();
  if (pid == 0) {
    const std::string log = (s / "run.log").string();
    const int fd = ::open(log.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
    ::dup2(fd, 1);
    ::dup2(fd, 2);
    ::execl(CLIF_BIN, CLIF_BIN, "run", "--input", input.c_str(), "--out-dir", out.c_str(),
            static_cast<char*>(nullptr));
    std::_Exit(127);
  }
  int status = 0;
  struct rusage usage {};
  ::wait4(pid, &status, 0, &usage);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const double peak_gb = static_cast<double>(usage.ru_maxrss) / (1024.0 * 1024.0);  // KiB
  o.require(WIFEXITED(status) && WEXITSTATUS(status) == 0,
            "run failed: " + cli::slurp(s / "run.log"));
  o.require(secs < 300.0, "run took " + fmt(secs) + " s");
  o.require(peak_gb < 4.0, "peak RSS " + fmt(peak_gb) + " GB");
  const auto log = cli::slurp(s / "run.log");
  o.detail = "50000x12 run " + fmt(secs) + " s, peak RSS " + fmt(peak_gb * 1024.0) + " MB; " +
             log.substr(0, log.find('\n'));
  return o;
}

}  // namespace

int main() {
  std::printf("clif acceptance suite (%u hardware threads)\n",
              std::max(1u, std::thread::hardware_concurrency()));
  criterion("wasserstein-oracle", 10, wasserstein_oracle);
  criterion("wasserstein-binary", 0, wasserstein_binary);
  criterion("mst-exactness", 30, mst_exactness);
  criterion("hdbscan-planted-recovery", 20, hdbscan_recovery);
  criterion("clif-behaviour", 30, clif_behaviour);
  criterion("anova-fixture", 0, anova_fixture);
  criterion("pfi-thresholds", 0, pfi_thresholds);
  criterion("cli-determinism", 0, determinism);
  criterion("scale-50k", 0, scale);
  std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
