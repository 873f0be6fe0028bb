// clif: staged command-line pipeline.
//
//   clif ingest           raw CSV + schema -> encoded dataset + preprocess report
//   clif select-features  encoded dataset -> ANOVA/ablation rankings + selection
//   clif run              encoded dataset (+ selection) -> iteration reports
//   clif generate         seeded synthetic blobs for tests and demos
//
// Errors print one line `clif: error[<kind>]: <message>` and exit 1 (usage or
// configuration) or 2 (data).

#include <openssl/evp.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "clif/cluster.hpp"
#include "clif/error.hpp"
#include "clif/featsel.hpp"
#include "clif/iteration.hpp"
#include "clif/pfi.hpp"
#include "clif/reports.hpp"
#include "clif/simd.hpp"
#include "clif/synth.hpp"
#include "clif/tabular.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitData = 2;

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw clif::DataError(path.string() + ": cannot open file");
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  std::string hex;
  char byte[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(byte, sizeof(byte), "%02x", digest[i]);
    hex += byte;
  }
  return hex;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw clif::DataError(path.string() + ": cannot open for writing");
  return out;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw clif::DataError(dir.string() + ": cannot create directory: " + ec.message());
}

class Stopwatch {
 public:
  double lap_ms() {
    const auto now = std::chrono::steady_clock::now();
    const double ms = std::chrono::duration<double, std::milli>(now - last_).count();
    last_ = now;
    return ms;
  }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

// ---- ingest ------------------------------------------------------------

struct IngestArgs {
  std::string input;
  std::string schema;
  std::string out_dir = ".";
  std::string id_column;
};

int cmd_ingest(const IngestArgs& a) {
  const auto schema = clif::tabular::load_schema(a.schema);
  clif::tabular::LoadOptions opts;
  if (!a.id_column.empty()) opts.id_column = a.id_column;
  const auto raw = clif::tabular::load_csv(a.input, schema, opts);
  const auto [encoded, report] = clif::tabular::preprocess(raw);

  const fs::path dir(a.out_dir);
  ensure_dir(dir);
  clif::tabular::write_csv(encoded, dir / "dataset.csv");
  open_output(dir / "preprocess_report.json") << clif::reports::preprocess_report_json(report);
  std::cout << "ingested " << raw.n_rows() << " rows, " << raw.n_cols() << " columns -> "
            << encoded.n_cols() << " features (" << (dir / "dataset.csv").string() << ")\n";
  return 0;
}

// ---- shared dataset loading ----------------------------------------------

struct LoadedData {
  clif::tabular::Dataset raw;     // encoded, unscaled
  clif::tabular::Dataset scaled;  // numerical columns min-max scaled
};

LoadedData load_encoded(const std::string& input, const std::string& report_path) {
  std::optional<clif::tabular::PreprocessReport> report;
  if (!report_path.empty()) report = clif::reports::load_preprocess_report(report_path);
  LoadedData d;
  d.raw = clif::tabular::load_encoded_csv(input, report ? &*report : nullptr);
  d.scaled = clif::tabular::scale_minmax(d.raw).first;
  return d;
}

// ---- select-features -----------------------------------------------------

struct SelectArgs {
  std::string input;
  std::string report;
  std::string target;
  std::size_t top_k = 12;
  std::size_t folds = 5;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
};

int cmd_select(const SelectArgs& a) {
  const auto data = load_encoded(a.input, a.report);
  const auto view = clif::featsel::resolve_target(data.scaled, a.target);
  if (a.top_k == 0 || a.top_k > view.feature_names.size()) {
    throw clif::ConfigError("--top-k " + std::to_string(a.top_k) + " must be in [1, " +
                            std::to_string(view.feature_names.size()) + "]");
  }
  const auto anova = clif::featsel::rank_anova(data.scaled, a.target);
  clif::featsel::AblationOptions opts;
  opts.folds = a.folds;
  opts.seed = a.seed;
  const auto ablation = clif::featsel::ablation_rank(data.scaled, a.target, opts);
  const auto selection = clif::featsel::combine_select(anova, ablation, a.top_k);

  const fs::path dir(a.out_dir);
  ensure_dir(dir);
  {
    auto out = open_output(dir / "anova_ranking.csv");
    clif::reports::write_ranking(anova, out);
  }
  {
    auto out = open_output(dir / "ablation_ranking.csv");
    clif::reports::write_ranking(ablation, out);
  }
  {
    auto out = open_output(dir / "selection.csv");
    clif::reports::write_selection(selection, out);
  }
  std::size_t agreed = 0;
  for (const auto& s : selection.selected) {
    agreed += s.source == clif::featsel::SelectionSource::both ? 1 : 0;
  }
  std::cout << "selected " << selection.selected.size() << " features (" << agreed
            << " agreed by both rankings) -> " << (dir / "selection.csv").string() << "\n";
  return 0;
}

// ---- run -----------------------------------------------------------------

struct RunArgs {
  std::string input;
  std::string report;
  std::string selection;
  double dense_threshold = 0.85;
  double sparse_low = 0.65;
  std::size_t sparse_min_size = 0;  // 0 = automatic
  std::size_t k_neighbors = 5;
  std::size_t min_cluster_size = 5;
  std::size_t min_samples = 0;  // 0 = min_cluster_size
  std::size_t max_iterations = 50;
  std::uint64_t seed = 0;
  double categorical_cut = 1.0;
  double numerical_fraction = 0.10;
  std::string pfi_clusters = "selected";
  bool write_labels = false;
  std::string out_dir = ".";
};

int cmd_run(const RunArgs& a) {
  Stopwatch watch;
  ordered_json timings = ordered_json::object();

  clif::iteration::ClifConfig cfg;
  cfg.dense_threshold = a.dense_threshold;
  cfg.sparse_low = a.sparse_low;
  if (a.sparse_min_size > 0) cfg.sparse_min_size = a.sparse_min_size;
  cfg.k_neighbors = a.k_neighbors;
  cfg.max_iterations = a.max_iterations;
  cfg.clusterer.min_cluster_size = a.min_cluster_size;
  cfg.clusterer.min_samples = a.min_samples == 0 ? a.min_cluster_size : a.min_samples;
  cfg.seed = a.seed;
  cfg.validate();
  clif::pfi::PfiThresholds thresholds{a.categorical_cut, a.numerical_fraction};
  thresholds.validate();

  const auto data = load_encoded(a.input, a.report);
  std::vector<std::string> selected;
  if (!a.selection.empty()) selected = clif::reports::read_selection(a.selection);
  const auto specs = clif::pfi::feature_specs(data.raw, selected);
  std::vector<std::size_t> cols;
  for (const auto& s : specs) cols.push_back(s.column);
  const clif::Matrix points = data.scaled.to_matrix().select_cols(cols);
  const clif::Matrix raw = data.raw.to_matrix();
  timings["load"] = watch.lap_ms();

  const clif::cluster::HdbscanClusterer clusterer(cfg.clusterer);
  const auto result = clif::iteration::run_clif(points, clusterer, cfg);
  clif::iteration::check_invariants(result, points.rows(), cfg);
  timings["cluster_iterations"] = watch.lap_ms();

  std::vector<clif::pfi::PrincipalFeatureFinding> findings;
  for (const auto& rec : result.iterations) {
    std::vector<clif::density::ClusterInfo> compared;
    if (a.pfi_clusters == "all") {
      compared = rec.all_clusters;
    } else {
      compared = rec.dense_extracted;
      compared.insert(compared.end(), rec.sparse_flagged.begin(), rec.sparse_flagged.end());
    }
    auto part = clif::pfi::pfi_report(rec.iteration, compared, raw, specs, thresholds);
    findings.insert(findings.end(), part.begin(), part.end());
  }
  timings["principal_features"] = watch.lap_ms();

  const fs::path dir(a.out_dir);
  ensure_dir(dir);
  std::vector<std::string> outputs;
  auto emit = [&](const std::string& name, auto&& writer) {
    auto out = open_output(dir / name);
    writer(out);
    outputs.push_back((dir / name).string());
  };
  const auto& ids = data.raw.row_ids();
  emit("iterations.csv", [&](std::ostream& o) { clif::reports::write_iterations(result, o); });
  emit("assignments.csv",
       [&](std::ostream& o) { clif::reports::write_assignments(result, ids, o); });
  emit("density_pattern.csv",
       [&](std::ostream& o) { clif::reports::write_density_pattern(result, o); });
  emit("principal_features.csv",
       [&](std::ostream& o) { clif::reports::write_principal_features(findings, o); });
  if (a.write_labels) {
    for (const auto& rec : result.iterations) {
      clif::cluster::ClusterLabels labels;
      labels.labels.assign(rec.input_rows.size(), clif::cluster::kNoise);
      std::map<std::size_t, std::size_t> pos;
      for (std::size_t i = 0; i < rec.input_rows.size(); ++i) pos[rec.input_rows[i]] = i;
      for (const auto& c : rec.all_clusters) {
        for (auto r : c.member_rows) labels.labels[pos.at(r)] = c.cluster_id;
      }
      std::vector<std::string> rec_ids;
      for (auto r : rec.input_rows) rec_ids.push_back(ids[r]);
      emit("labels_iteration_" + std::to_string(rec.iteration) + ".csv",
           [&](std::ostream& o) { clif::reports::write_labels(labels, rec_ids, o); });
    }
  }
  timings["write"] = watch.lap_ms();

  ordered_json manifest;
  manifest["command"] = "run";
  manifest["config"] = {
      {"dense_threshold", cfg.dense_threshold},
      {"sparse_low", cfg.sparse_low},
      {"sparse_min_size", cfg.sparse_min_size ? ordered_json(*cfg.sparse_min_size)
                                              : ordered_json("auto")},
      {"k_neighbors", cfg.k_neighbors},
      {"min_cluster_size", cfg.clusterer.min_cluster_size},
      {"min_samples", cfg.clusterer.min_samples},
      {"max_iterations", cfg.max_iterations},
      {"seed", cfg.seed},
      {"categorical_cut", thresholds.categorical_cut},
      {"numerical_fraction", thresholds.numerical_fraction},
      {"pfi_clusters", a.pfi_clusters},
      {"clusterer", clusterer.describe()},
      {"features", [&] {
         std::vector<std::string> names;
         for (const auto& s : specs) names.push_back(s.name);
         return names;
       }()},
  };
  ordered_json inputs = ordered_json::array();
  inputs.push_back({{"role", "dataset"}, {"path", a.input}, {"sha256", sha256_file(a.input)}});
  if (!a.report.empty()) {
    inputs.push_back({{"role", "report"}, {"path", a.report}, {"sha256", sha256_file(a.report)}});
  }
  if (!a.selection.empty()) {
    inputs.push_back(
        {{"role", "selection"}, {"path", a.selection}, {"sha256", sha256_file(a.selection)}});
  }
  manifest["inputs"] = inputs;
  manifest["simd"] = std::string(clif::simd::isa_name(clif::simd::kernels().isa));
  manifest["terminal_reason"] = std::string(clif::iteration::to_string(result.terminal_reason));
  manifest["iterations"] = result.iterations.size();
  manifest["timings_ms"] = timings;
  outputs.push_back((dir / "manifest.json").string());
  manifest["outputs"] = outputs;
  open_output(dir / "manifest.json") << manifest.dump(2) << "\n";

  std::size_t extracted = 0;
  for (const auto& rec : result.iterations) extracted += rec.dense_extracted.size();
  std::cout << result.iterations.size() << " iterations, " << extracted
            << " dense clusters extracted, terminal reason "
            << clif::iteration::to_string(result.terminal_reason) << "\n";
  return 0;
}

// ---- generate ------------------------------------------------------------

struct GenerateArgs {
  std::size_t blobs = 3;
  std::size_t points_per_blob = 60;
  std::vector<double> spreads{0.02};
  std::size_t noise = 0;
  std::size_t dims = 2;
  double separation = 1.0;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
};

int cmd_generate(const GenerateArgs& a) {
  clif::synth::BlobSpec spec;
  spec.n_blobs = a.blobs;
  spec.points_per_blob = a.points_per_blob;
  spec.spreads = a.spreads;
  spec.n_noise = a.noise;
  spec.dims = a.dims;
  spec.center_separation = a.separation;
  spec.seed = a.seed;
  const auto blobs = clif::synth::generate_blobs(spec);
  const auto ds = blobs.to_dataset();

  const fs::path dir(a.out_dir);
  ensure_dir(dir);
  clif::tabular::write_csv(ds, dir / "data.csv");
  open_output(dir / "data.schema") << clif::tabular::format_schema(ds.schemas());
  clif::cluster::ClusterLabels truth{blobs.truth};
  {
    auto out = open_output(dir / "truth.csv");
    clif::reports::write_labels(truth, ds.row_ids(), out);
  }
  std::cout << "generated " << ds.n_rows() << " rows x " << ds.n_cols() << " dims -> "
            << (dir / "data.csv").string() << "\n";
  return 0;
}

int fail(const char* kind, const std::string& message, int code) {
  std::string line = message;
  for (auto& c : line) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  std::cerr << "clif: error[" << kind << "]: " << line << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Iterative dense-cluster extraction with principal feature identification"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "clif 1.0.0");

  IngestArgs ingest;
  auto* c_ingest = app.add_subcommand("ingest", "Impute and one-hot encode a raw CSV");
  c_ingest->add_option("--input", ingest.input, "Raw CSV file")->required();
  c_ingest->add_option("--schema", ingest.schema, "Schema file (name,kind[,codes])")->required();
  c_ingest->add_option("--id-column", ingest.id_column, "Column holding row identifiers");
  c_ingest->add_option("--out-dir", ingest.out_dir, "Output directory");

  SelectArgs select;
  auto* c_select =
      app.add_subcommand("select-features", "Rank features by ANOVA and ablation and select");
  c_select->add_option("--input", select.input, "Encoded dataset CSV")->required();
  c_select->add_option("--report", select.report, "Preprocess report JSON");
  c_select->add_option("--target", select.target, "Target column (original name)")->required();
  c_select->add_option("--top-k", select.top_k, "Number of features to select")
      ->capture_default_str();
  c_select->add_option("--folds", select.folds, "Cross-validation folds")->capture_default_str();
  c_select->add_option("--seed", select.seed, "Random seed")->capture_default_str();
  c_select->add_option("--out-dir", select.out_dir, "Output directory");

  RunArgs run;
  auto* c_run = app.add_subcommand("run", "Run iterative dense-cluster extraction");
  c_run->add_option("--input", run.input, "Encoded dataset CSV")->required();
  c_run->add_option("--report", run.report, "Preprocess report JSON");
  c_run->add_option("--selection", run.selection, "Selection CSV (default: all features)");
  c_run->add_option("--dense-threshold", run.dense_threshold)->capture_default_str();
  c_run->add_option("--sparse-low", run.sparse_low)->capture_default_str();
  c_run->add_option("--sparse-min-size", run.sparse_min_size,
                    "Size floor for sparse clusters (0 = 20x mean dense size)");
  c_run->add_option("--k-neighbors", run.k_neighbors)->capture_default_str();
  c_run->add_option("--min-cluster-size", run.min_cluster_size)->capture_default_str();
  c_run->add_option("--min-samples", run.min_samples, "Defaults to --min-cluster-size");
  c_run->add_option("--max-iterations", run.max_iterations)->capture_default_str();
  c_run->add_option("--seed", run.seed)->capture_default_str();
  c_run->add_option("--categorical-cut", run.categorical_cut)->capture_default_str();
  c_run->add_option("--numerical-fraction", run.numerical_fraction)->capture_default_str();
  c_run->add_option("--pfi-clusters", run.pfi_clusters,
                    "Clusters compared for principal features")
      ->check(CLI::IsMember({"selected", "all"}))
      ->capture_default_str();
  c_run->add_flag("--write-labels", run.write_labels, "Also write per-iteration label files");
  c_run->add_option("--out-dir", run.out_dir, "Output directory");

  GenerateArgs gen;
  auto* c_gen = app.add_subcommand("generate", "Write seeded synthetic Gaussian blobs");
  c_gen->add_option("--blobs", gen.blobs)->capture_default_str();
  c_gen->add_option("--points-per-blob", gen.points_per_blob)->capture_default_str();
  c_gen->add_option("--spread", gen.spreads, "Sigma, one value or one per blob")
      ->delimiter(',')
      ->capture_default_str();
  c_gen->add_option("--noise", gen.noise, "Uniform background points")->capture_default_str();
  c_gen->add_option("--dims", gen.dims)->capture_default_str();
  c_gen->add_option("--separation", gen.separation, "Minimum center distance")
      ->capture_default_str();
  c_gen->add_option("--seed", gen.seed)->capture_default_str();
  c_gen->add_option("--out-dir", gen.out_dir, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what(), kExitConfig);
  }

  try {
    if (c_ingest->parsed()) return cmd_ingest(ingest);
    if (c_select->parsed()) return cmd_select(select);
    if (c_run->parsed()) return cmd_run(run);
    if (c_gen->parsed()) return cmd_generate(gen);
  } catch (const clif::ConfigError& e) {
    return fail("config", e.what(), kExitConfig);
  } catch (const clif::DataError& e) {
    return fail("data", e.what(), kExitData);
  } catch (const std::exception& e) {
    return fail("internal", e.what(), kExitData);
  }
  return kExitConfig;
}
