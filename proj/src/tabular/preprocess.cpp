#include <algorithm>
#include <set>

#include "clif/error.hpp"
#include "clif/tabular.hpp"

namespace clif::tabular {

std::pair<Dataset, PreprocessReport> impute(const Dataset& ds) {
  PreprocessReport report;
  auto rows = ds.rows();
  const auto& schemas = ds.schemas();

  for (std::size_t c = 0; c < schemas.size(); ++c) {
    const auto& col = schemas[c];
    std::size_t missing = 0;
    if (col.kind == ColumnKind::categorical) {
      for (auto& row : rows) {
        if (is_missing(row[c])) {
          row[c] = std::string(kCategoricalFill);
          ++missing;
        }
      }
    } else {
      double sum = 0.0;
      std::size_t present = 0;
      for (const auto& row : rows) {
        if (const auto* d = std::get_if<double>(&row[c])) {
          sum += *d;
          ++present;
        }
      }
      const bool any_missing = present < rows.size();
      if (any_missing && present == 0) {
        throw DataError("column '" + col.name + "': no observed values to impute a mean from");
      }
      if (present > 0) {
        const double mean = sum / static_cast<double>(present);
        report.column_means[col.name] = mean;
        for (auto& row : rows) {
          if (is_missing(row[c])) {
            row[c] = mean;
            ++missing;
          }
        }
      }
    }
    report.imputed_counts[col.name] = missing;
  }
  return {Dataset(schemas, std::move(rows), ds.row_ids()), std::move(report)};
}

std::pair<Dataset, PreprocessReport> one_hot_encode(const Dataset& ds) {
  PreprocessReport report;
  const auto& schemas = ds.schemas();

  // Per source column: the output columns it expands to.
  struct Plan {
    std::size_t source;
    std::vector<std::string> values;  // empty for numerical pass-through
  };
  std::vector<Plan> plans;
  std::vector<ColumnSchema> out_schemas;

  for (std::size_t c = 0; c < schemas.size(); ++c) {
    const auto& col = schemas[c];
    if (col.kind == ColumnKind::numerical) {
      plans.push_back({c, {}});
      out_schemas.push_back(col);
      continue;
    }
    std::set<std::string> distinct;
    for (std::size_t r = 0; r < ds.n_rows(); ++r) {
      const auto* s = std::get_if<std::string>(&ds.cell(r, c));
      if (s == nullptr) {
        throw DataError("column '" + col.name + "', row " + ds.row_ids()[r] +
                        ": categorical cell is missing or numeric; impute before encoding");
      }
      distinct.insert(*s);
    }
    Plan plan{c, {distinct.begin(), distinct.end()}};
    auto& names = report.encoding_map[col.name];
    for (const auto& v : plan.values) {
      ColumnSchema derived;
      derived.name = col.name + "=" + v;
      derived.kind = ColumnKind::numerical;
      derived.derived_from = col.name;
      names.push_back(derived.name);
      out_schemas.push_back(std::move(derived));
    }
    plans.push_back(std::move(plan));
  }

  std::vector<std::vector<Cell>> rows;
  rows.reserve(ds.n_rows());
  for (std::size_t r = 0; r < ds.n_rows(); ++r) {
    std::vector<Cell> row;
    row.reserve(out_schemas.size());
    for (const auto& plan : plans) {
      const Cell& cell = ds.cell(r, plan.source);
      if (plan.values.empty() && schemas[plan.source].kind == ColumnKind::numerical) {
        row.push_back(cell);
        continue;
      }
      const auto& token = std::get<std::string>(cell);
      for (const auto& v : plan.values) row.emplace_back(v == token ? 1.0 : 0.0);
    }
    rows.push_back(std::move(row));
  }
  return {Dataset(std::move(out_schemas), std::move(rows), ds.row_ids()), std::move(report)};
}

std::pair<Dataset, PreprocessReport> scale_minmax(const Dataset& ds) {
  if (!ds.is_fully_numeric()) {
    throw DataError("scale_minmax requires a fully numeric dataset (impute and encode first)");
  }
  PreprocessReport report;
  auto rows = ds.rows();
  const auto& schemas = ds.schemas();
  for (std::size_t c = 0; c < schemas.size(); ++c) {
    if (schemas[c].is_binary_indicator()) continue;
    if (rows.empty()) continue;
    double lo = std::get<double>(rows.front()[c]);
    double hi = lo;
    for (const auto& row : rows) {
      const double v = std::get<double>(row[c]);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    report.scaling_ranges[schemas[c].name] = {lo, hi};
    const double span = hi - lo;
    for (auto& row : rows) {
      const double v = std::get<double>(row[c]);
      row[c] = span > 0.0 ? (v - lo) / span : 0.0;
    }
  }
  return {Dataset(schemas, std::move(rows), ds.row_ids()), std::move(report)};
}

double unscale(double scaled, std::pair<double, double> range) noexcept {
  return range.first + scaled * (range.second - range.first);
}

std::pair<Dataset, PreprocessReport> preprocess(const Dataset& ds) {
  auto [imputed, report] = impute(ds);
  auto [encoded, enc_report] = one_hot_encode(imputed);
  report.merge(enc_report);
  auto scaled = scale_minmax(encoded);
  report.merge(scaled.second);
  return {std::move(encoded), std::move(report)};
}

}  // namespace clif::tabular
