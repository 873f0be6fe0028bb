#pragma once

// Machine-readable outputs. All numbers use the shortest round-trip
// representation, so identical inputs give byte-identical files.

#include <filesystem>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "clif/cluster.hpp"
#include "clif/featsel.hpp"
#include "clif/iteration.hpp"
#include "clif/pfi.hpp"
#include "clif/tabular.hpp"

namespace clif::reports {

std::string format_number(double v);

/// `feature,score,rank` with 1-based ranks.
void write_ranking(const featsel::FeatureRanking& ranking, std::ostream& out);
/// `feature,source`.
void write_selection(const featsel::SelectionResult& selection, std::ostream& out);
/// Reads the `feature` column of a selection file.
std::vector<std::string> read_selection(const std::filesystem::path& path);

/// `row_id,label`.
void write_labels(const cluster::ClusterLabels& labels, std::span<const std::string> row_ids,
                  std::ostream& out);

/// `iteration,rank,cluster_id,size,density` (plot data for density patterns).
void write_density_pattern(const iteration::ClifResult& result, std::ostream& out);
/// `iteration,cluster_id,size,density,class` with class in {dense,sparse,other}.
void write_iterations(const iteration::ClifResult& result, std::ostream& out);
/// `row_id,iteration,cluster_id,disposition`, one line per row per iteration
/// it took part in; disposition in {extracted,flagged_sparse,retained,noise}
/// and cluster_id -1 for noise.
void write_assignments(const iteration::ClifResult& result, std::span<const std::string> row_ids,
                       std::ostream& out);
/// `iteration,cluster_a,cluster_b,feature,distance,threshold,principal`.
void write_principal_features(std::span<const pfi::PrincipalFeatureFinding> findings,
                              std::ostream& out);

std::string preprocess_report_json(const tabular::PreprocessReport& report);
tabular::PreprocessReport parse_preprocess_report(const std::string& json_text);
tabular::PreprocessReport load_preprocess_report(const std::filesystem::path& path);

}  // namespace clif::reports
