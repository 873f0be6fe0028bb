#include <doctest.h>

#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli_harness.hpp"
#include "clif/cluster.hpp"
#include "clif/featsel.hpp"
#include "clif/iteration.hpp"
#include "clif/pfi.hpp"
#include "clif/reports.hpp"
#include "clif/tabular.hpp"

namespace {

std::size_t count_lines(const std::string& s) {
  std::size_t n = 0;
  for (char c : s) n += c == '\n' ? 1 : 0;
  return n;
}

bool single_diagnostic(const cli::Result& r, const std::string& kind) {
  return r.err.rfind("clif: error[" + kind + "]: ", 0) == 0 && count_lines(r.err) == 1;
}

// Mixed-type survey-like table with three latent groups and a target.
void write_survey(const cli::Scratch& s, std::size_t rows, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::ostringstream csv;
  csv << "SEQN,age,bmi,sbp,sex,smoker,activity,region,diabetes\n";
  for (std::size_t r = 0; r < rows; ++r) {
    const int grp = static_cast<int>(rng() % 3);
    csv << 1000 + r << ',';
    if (rng() % 20 == 0) {
      csv << ',';
    } else {
      csv << static_cast<int>(30 + 20 * grp + 2 * g(rng)) << ',';
    }
    csv << 22 + 4 * grp + 0.5 * g(rng) << ',';
    csv << (rng() % 25 == 0 ? std::string(".") : std::to_string(110 + 15 * grp + g(rng))) << ',';
    csv << (rng() % 2 ? "F" : "M") << ',';
    csv << (grp == 2 ? "yes" : (rng() % 30 == 0 ? "" : "no")) << ',';
    csv << (grp == 0 ? "high" : grp == 1 ? "mid" : "low") << ',';
    csv << "NSEW"[rng() % 4] << ',';
    csv << (grp == 2 ? "1" : "0") << '\n';
  }
  cli::spit(s / "survey.csv", csv.str());
  cli::spit(s / "survey.schema",
            "age,numerical\nbmi,numerical\nsbp,numerical,.\nsex,categorical\n"
            "smoker,categorical\nactivity,categorical\nregion,categorical\ndiabetes,categorical\n");
}

}  // namespace

TEST_CASE("cli: help and usage errors") {
  cli::Scratch s("usage");
  CHECK(s.run({"--help"}).exit_code == 0);
  CHECK(s.run({"run", "--help"}).exit_code == 0);
  const auto none = s.run({});
  CHECK(none.exit_code == 1);
  CHECK(single_diagnostic(none, "usage"));
  const auto bad = s.run({"run", "--input", "x.csv", "--bogus"});
  CHECK(bad.exit_code == 1);
  CHECK(single_diagnostic(bad, "usage"));
}

TEST_CASE("cli: generate is deterministic per seed") {
  cli::Scratch s("gen");
  const std::vector<std::string> base{"generate", "--blobs", "2", "--points-per-blob", "15",
                                      "--noise", "5", "--dims", "3", "--seed", "4"};
  auto a = base;
  a.insert(a.end(), {"--out-dir", (s / "a").string()});
  auto b = base;
  b.insert(b.end(), {"--out-dir", (s / "b").string()});
  REQUIRE(s.run(a).exit_code == 0);
  REQUIRE(s.run(b).exit_code == 0);
  for (const char* f : {"data.csv", "truth.csv", "data.schema"}) {
    CHECK(cli::slurp(s / "a" / f) == cli::slurp(s / "b" / f));
  }
  CHECK(count_lines(cli::slurp(s / "a" / "data.csv")) == 36);
  const auto truth = cli::slurp(s / "a" / "truth.csv");
  CHECK(truth.rfind("row_id,label\n0,0\n", 0) == 0);
  CHECK(truth.find("\n34,-1\n") != std::string::npos);

  const auto bad = s.run({"generate", "--dims", "0", "--out-dir", (s / "c").string()});
  CHECK(bad.exit_code == 1);
  CHECK(single_diagnostic(bad, "config"));
}

TEST_CASE("cli: ingest a toy table") {
  cli::Scratch s("ingest");
  cli::spit(s / "toy.csv", "id,age,sex,smoker\n1,30,F,yes\n2,,M,\n3,60,F,no\n");
  cli::spit(s / "toy.schema", "age,numerical\nsex,categorical\nsmoker,categorical\n");
  const auto r = s.run({"ingest", "--input", (s / "toy.csv").string(), "--schema",
                        (s / "toy.schema").string(), "--id-column", "id", "--out-dir",
                        (s / "out").string()});
  REQUIRE(r.exit_code == 0);
  CHECK(cli::slurp(s / "out" / "dataset.csv") ==
        "row_id,age,sex=F,sex=M,smoker=777,smoker=no,smoker=yes\n"
        "1,30,1,0,0,0,1\n"
        "2,45,0,1,1,0,0\n"
        "3,60,1,0,0,1,0\n");
  const auto report = clif::reports::load_preprocess_report(s / "out" / "preprocess_report.json");
  CHECK(report.imputed_counts.at("age") == 1);
  CHECK(report.imputed_counts.at("smoker") == 1);
  CHECK(report.column_means.at("age") == 45.0);
  CHECK(report.encoding_map.at("sex") == std::vector<std::string>{"sex=F", "sex=M"});
}

TEST_CASE("cli: schema mismatch is a data error naming the column") {
  cli::Scratch s("mismatch");
  cli::spit(s / "toy.csv", "age,sex\n30,F\n");
  cli::spit(s / "toy.schema", "age,numerical\nweight,numerical\n");
  const auto r = s.run({"ingest", "--input", (s / "toy.csv").string(), "--schema",
                        (s / "toy.schema").string(), "--out-dir", (s / "out").string()});
  CHECK(r.exit_code == 2);
  CHECK(single_diagnostic(r, "data"));
  CHECK(r.err.find("weight") != std::string::npos);

  const auto missing = s.run({"ingest", "--input", (s / "nope.csv").string(), "--schema",
                              (s / "toy.schema").string()});
  CHECK(missing.exit_code == 2);
  CHECK(single_diagnostic(missing, "data"));
}

TEST_CASE("cli: select-features errors and defaults") {
  cli::Scratch s("select");
  write_survey(s, 150, 1);
  REQUIRE(s.run({"ingest", "--input", (s / "survey.csv").string(), "--schema",
                 (s / "survey.schema").string(), "--id-column", "SEQN", "--out-dir",
                 s.path().string()})
              .exit_code == 0);
  const auto data = (s / "dataset.csv").string();
  const auto report = (s / "preprocess_report.json").string();

  const auto encoded = cli::slurp(s / "dataset.csv");
  const auto header = encoded.substr(0, encoded.find('\n'));
  std::size_t features = 0;
  for (char c : header) features += c == ',' ? 1 : 0;
  features -= 2;  // the diabetes=0/1 block is the target
  REQUIRE(features >= 14);

  const auto ok = s.run({"select-features", "--input", data, "--report", report, "--target",
                         "diabetes", "--out-dir", s.path().string()});
  REQUIRE(ok.exit_code == 0);
  CHECK(count_lines(cli::slurp(s / "selection.csv")) == 1 + 12);
  CHECK(count_lines(cli::slurp(s / "anova_ranking.csv")) == 1 + features);
  CHECK(count_lines(cli::slurp(s / "ablation_ranking.csv")) == 1 + features);

  const auto big = s.run({"select-features", "--input", data, "--target", "diabetes", "--top-k",
                          std::to_string(features + 1), "--out-dir", s.path().string()});
  CHECK(big.exit_code == 1);
  CHECK(single_diagnostic(big, "config"));

  const auto unknown = s.run({"select-features", "--input", data, "--target", "height",
                              "--out-dir", s.path().string()});
  CHECK(unknown.exit_code == 1);
  CHECK(single_diagnostic(unknown, "config"));
  CHECK(unknown.err.find("height") != std::string::npos);
}

TEST_CASE("cli: duplicated feature scores about zero in the ablation ranking") {
  cli::Scratch s("dup");
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 0.1);
  std::ostringstream csv;
  csv << "row_id,a,a_copy,noise,y\n";
  for (int r = 0; r < 80; ++r) {
    const int cls = r % 2;
    const double a = cls + u(rng);
    csv << r << ',' << a << ',' << a << ',' << 10 * u(rng) << ',' << cls << '\n';
  }
  cli::spit(s / "dup.csv", csv.str());
  REQUIRE(s.run({"select-features", "--input", (s / "dup.csv").string(), "--target", "y",
                 "--top-k", "2", "--out-dir", s.path().string()})
              .exit_code == 0);
  std::istringstream in(cli::slurp(s / "ablation_ranking.csv"));
  const auto recs = clif::tabular::read_csv_records(in);
  bool seen = false;
  for (const auto& rec : recs) {
    if (rec.fields[0] == "a_copy") {
      CHECK(std::abs(std::stod(rec.fields[1])) <= 0.01);
      seen = true;
    }
  }
  CHECK(seen);
}

TEST_CASE("cli: run on generated blobs with defaults") {
  cli::Scratch s("run");
  REQUIRE(s.run({"generate", "--blobs", "1", "--points-per-blob", "200", "--spread", "0.01",
                 "--noise", "800", "--dims", "8", "--seed", "3", "--out-dir", s.path().string()})
              .exit_code == 0);
  const auto r = s.run({"run", "--input", (s / "data.csv").string(), "--out-dir",
                        (s / "out").string()});
  REQUIRE(r.exit_code == 0);
  const auto manifest = nlohmann::json::parse(cli::slurp(s / "out" / "manifest.json"));
  CHECK(manifest["terminal_reason"] == "no_dense_clusters");
  CHECK(manifest["config"]["dense_threshold"] == 0.85);
  CHECK(manifest["config"]["sparse_low"] == 0.65);
  CHECK(manifest["config"]["k_neighbors"] == 5);
  CHECK(manifest["config"]["min_cluster_size"] == 5);
  CHECK(manifest["config"]["min_samples"] == 5);
  CHECK(manifest["config"]["max_iterations"] == 50);
  CHECK(manifest["config"]["seed"] == 0);
  CHECK(manifest["inputs"][0]["sha256"].get<std::string>().size() == 64);
  for (const auto& out : manifest["outputs"]) {
    CHECK(std::filesystem::exists(out.get<std::string>()));
  }

  const auto iterations = cli::slurp(s / "out" / "iterations.csv");
  CHECK(iterations.find("\n1,") != std::string::npos);
  CHECK(iterations.find(",dense\n") != std::string::npos);
  std::size_t extracted_it1 = 0;
  std::istringstream in(cli::slurp(s / "out" / "assignments.csv"));
  for (const auto& rec : clif::tabular::read_csv_records(in)) {
    if (rec.fields[1] == "1" && rec.fields[3] == "extracted") ++extracted_it1;
  }
  CHECK(extracted_it1 >= 190);

  const auto bad = s.run({"run", "--input", (s / "data.csv").string(), "--dense-threshold",
                          "1.01", "--out-dir", (s / "bad").string()});
  CHECK(bad.exit_code == 1);
  CHECK(single_diagnostic(bad, "config"));
  const auto inverted = s.run({"run", "--input", (s / "data.csv").string(), "--sparse-low",
                               "0.9", "--out-dir", (s / "bad").string()});
  CHECK(inverted.exit_code == 1);
}

TEST_CASE("cli: staged pipeline equals direct library calls") {
  cli::Scratch s("stages");
  write_survey(s, 240, 2);
  const auto dir = s.path().string();
  REQUIRE(s.run({"ingest", "--input", (s / "survey.csv").string(), "--schema",
                 (s / "survey.schema").string(), "--id-column", "SEQN", "--out-dir", dir})
              .exit_code == 0);
  REQUIRE(s.run({"select-features", "--input", (s / "dataset.csv").string(), "--report",
                 (s / "preprocess_report.json").string(), "--target", "diabetes", "--top-k", "6",
                 "--seed", "5", "--out-dir", dir})
              .exit_code == 0);
  REQUIRE(s.run({"run", "--input", (s / "dataset.csv").string(), "--report",
                 (s / "preprocess_report.json").string(), "--selection",
                 (s / "selection.csv").string(), "--seed", "5", "--min-cluster-size", "8",
                 "--out-dir", dir})
              .exit_code == 0);

  namespace tb = clif::tabular;
  tb::LoadOptions opts;
  opts.id_column = "SEQN";
  const auto raw = tb::load_csv(s / "survey.csv", tb::load_schema(s / "survey.schema"), opts);
  const auto encoded = tb::preprocess(raw).first;
  const auto scaled = tb::scale_minmax(encoded).first;
  clif::featsel::AblationOptions abl;
  abl.seed = 5;
  const auto selection =
      clif::featsel::combine_select(clif::featsel::rank_anova(scaled, "diabetes"),
                                    clif::featsel::ablation_rank(scaled, "diabetes", abl), 6);
  std::ostringstream sel;
  clif::reports::write_selection(selection, sel);
  CHECK(cli::slurp(s / "selection.csv") == sel.str());

  const auto names = selection.names();
  const auto specs = clif::pfi::feature_specs(encoded, names);
  std::vector<std::size_t> cols;
  for (const auto& f : specs) cols.push_back(f.column);
  clif::iteration::ClifConfig cfg;
  cfg.clusterer = {8, 8};
  cfg.seed = 5;
  const auto result = clif::iteration::run_clif(scaled.to_matrix().select_cols(cols),
                                                clif::cluster::HdbscanClusterer(cfg.clusterer),
                                                cfg);
  std::ostringstream iters, assigns;
  clif::reports::write_iterations(result, iters);
  clif::reports::write_assignments(result, encoded.row_ids(), assigns);
  CHECK(cli::slurp(s / "iterations.csv") == iters.str());
  CHECK(cli::slurp(s / "assignments.csv") == assigns.str());
}
