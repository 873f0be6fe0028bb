#include "clif/reports.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "clif/error.hpp"

namespace clif::reports {

using tabular::csv_escape;

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

void write_ranking(const featsel::FeatureRanking& ranking, std::ostream& out) {
  out << "feature,score,rank\n";
  std::size_t rank = 1;
  for (const auto& e : ranking.entries()) {
    out << csv_escape(e.name) << ',' << format_number(e.score) << ',' << rank++ << '\n';
  }
}

void write_selection(const featsel::SelectionResult& selection, std::ostream& out) {
  out << "feature,source\n";
  for (const auto& s : selection.selected) {
    out << csv_escape(s.name) << ',' << featsel::to_string(s.source) << '\n';
  }
}

std::vector<std::string> read_selection(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(path.string() + ": cannot open file");
  const auto records = tabular::read_csv_records(in, path.string());
  if (records.empty() || records.front().fields.empty() ||
      records.front().fields.front() != "feature") {
    throw DataError(path.string() + ":1: expected a header starting with 'feature'");
  }
  std::vector<std::string> names;
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].fields.empty() || records[i].fields.front().empty()) {
      throw DataError(path.string() + ":" + std::to_string(records[i].line) +
                      ": empty feature name");
    }
    names.push_back(records[i].fields.front());
  }
  return names;
}

void write_labels(const cluster::ClusterLabels& labels, std::span<const std::string> row_ids,
                  std::ostream& out) {
  if (row_ids.size() != labels.size()) throw ConfigError("row id count != label count");
  out << "row_id,label\n";
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out << csv_escape(row_ids[i]) << ',' << labels.labels[i] << '\n';
  }
}

void write_density_pattern(const iteration::ClifResult& result, std::ostream& out) {
  out << "iteration,rank,cluster_id,size,density\n";
  for (const auto& rec : result.iterations) {
    std::size_t rank = 1;
    for (const auto& c : rec.all_clusters) {
      out << rec.iteration << ',' << rank++ << ',' << c.cluster_id << ',' << c.size << ','
          << format_number(c.density) << '\n';
    }
  }
}

namespace {

enum class Disposition { extracted, flagged_sparse, retained };

std::map<int, Disposition> classify(const iteration::IterationRecord& rec) {
  std::map<int, Disposition> out;
  for (const auto& c : rec.all_clusters) out[c.cluster_id] = Disposition::retained;
  for (const auto& c : rec.sparse_flagged) out[c.cluster_id] = Disposition::flagged_sparse;
  for (const auto& c : rec.dense_extracted) out[c.cluster_id] = Disposition::extracted;
  return out;
}

}  // namespace

void write_iterations(const iteration::ClifResult& result, std::ostream& out) {
  out << "iteration,cluster_id,size,density,class\n";
  for (const auto& rec : result.iterations) {
    const auto cls = classify(rec);
    for (const auto& c : rec.all_clusters) {
      const auto d = cls.at(c.cluster_id);
      const char* name = d == Disposition::extracted        ? "dense"
                         : d == Disposition::flagged_sparse ? "sparse"
                                                            : "other";
      out << rec.iteration << ',' << c.cluster_id << ',' << c.size << ','
          << format_number(c.density) << ',' << name << '\n';
    }
  }
}

void write_assignments(const iteration::ClifResult& result, std::span<const std::string> row_ids,
                       std::ostream& out) {
  out << "row_id,iteration,cluster_id,disposition\n";
  std::vector<int> label_of(row_ids.size(), cluster::kNoise);
  for (const auto& rec : result.iterations) {
    const auto cls = classify(rec);
    for (auto r : rec.input_rows) label_of.at(r) = cluster::kNoise;
    for (const auto& c : rec.all_clusters) {
      for (auto r : c.member_rows) label_of.at(r) = c.cluster_id;
    }
    for (auto r : rec.input_rows) {
      const int label = label_of[r];
      const char* disposition = "noise";
      if (label != cluster::kNoise) {
        const auto d = cls.at(label);
        disposition = d == Disposition::extracted        ? "extracted"
                      : d == Disposition::flagged_sparse ? "flagged_sparse"
                                                         : "retained";
      }
      out << csv_escape(row_ids[r]) << ',' << rec.iteration << ',' << label << ','
          << disposition << '\n';
    }
  }
}

void write_principal_features(std::span<const pfi::PrincipalFeatureFinding> findings,
                              std::ostream& out) {
  out << "iteration,cluster_a,cluster_b,feature,distance,threshold,principal\n";
  for (const auto& f : findings) {
    out << f.iteration << ',' << f.cluster_a << ',' << f.cluster_b << ',' << csv_escape(f.feature)
        << ',' << format_number(f.distance) << ',' << format_number(f.threshold_used) << ','
        << (f.principal ? "true" : "false") << '\n';
  }
}

std::string preprocess_report_json(const tabular::PreprocessReport& report) {
  nlohmann::ordered_json j;
  j["imputed_counts"] = report.imputed_counts;
  j["column_means"] = report.column_means;
  j["encoding_map"] = report.encoding_map;
  nlohmann::ordered_json ranges = nlohmann::ordered_json::object();
  for (const auto& [name, r] : report.scaling_ranges) {
    ranges[name] = {{"min", r.first}, {"max", r.second}};
  }
  j["scaling_ranges"] = ranges;
  return j.dump(2) + "\n";
}

tabular::PreprocessReport parse_preprocess_report(const std::string& json_text) {
  tabular::PreprocessReport report;
  try {
    const auto j = nlohmann::json::parse(json_text);
    if (j.contains("imputed_counts")) {
      report.imputed_counts = j.at("imputed_counts").get<std::map<std::string, std::size_t>>();
    }
    if (j.contains("column_means")) {
      report.column_means = j.at("column_means").get<std::map<std::string, double>>();
    }
    if (j.contains("encoding_map")) {
      report.encoding_map =
          j.at("encoding_map").get<std::map<std::string, std::vector<std::string>>>();
    }
    if (j.contains("scaling_ranges")) {
      for (const auto& [name, r] : j.at("scaling_ranges").items()) {
        report.scaling_ranges[name] = {r.at("min").get<double>(), r.at("max").get<double>()};
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed preprocess report: ") + e.what());
  }
  return report;
}

tabular::PreprocessReport load_preprocess_report(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(path.string() + ": cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_preprocess_report(ss.str());
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

}  // namespace clif::reports
