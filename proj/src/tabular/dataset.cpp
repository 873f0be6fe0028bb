#include <cmath>
#include <unordered_set>

#include "clif/error.hpp"
#include "clif/tabular.hpp"

namespace clif::tabular {

std::string_view to_string(ColumnKind kind) noexcept {
  return kind == ColumnKind::numerical ? "numerical" : "categorical";
}

bool ColumnSchema::is_missing_token(std::string_view token) const {
  const auto first = token.find_first_not_of(" \t");
  if (first == std::string_view::npos) return true;
  return missing_codes.contains(std::string(token)) ||
         missing_codes.contains(std::string(token.substr(first, token.find_last_not_of(" \t") -
                                                                    first + 1)));
}

Dataset::Dataset(std::vector<ColumnSchema> schemas, std::vector<std::vector<Cell>> rows,
                 std::vector<std::string> row_ids)
    : schemas_(std::move(schemas)), rows_(std::move(rows)), row_ids_(std::move(row_ids)) {
  std::unordered_set<std::string> names;
  for (const auto& s : schemas_) {
    if (!names.insert(s.name).second) throw DataError("duplicate column name '" + s.name + "'");
  }
  if (row_ids_.size() != rows_.size()) {
    throw DataError("row id count " + std::to_string(row_ids_.size()) + " != row count " +
                    std::to_string(rows_.size()));
  }
  std::unordered_set<std::string> ids;
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    if (rows_[r].size() != schemas_.size()) {
      throw DataError("row " + row_ids_[r] + " has " + std::to_string(rows_[r].size()) +
                      " cells, schema has " + std::to_string(schemas_.size()));
    }
    if (!ids.insert(row_ids_[r]).second) throw DataError("duplicate row id '" + row_ids_[r] + "'");
  }
}

std::optional<std::size_t> Dataset::column_index(std::string_view name) const {
  for (std::size_t i = 0; i < schemas_.size(); ++i) {
    if (schemas_[i].name == name) return i;
  }
  return std::nullopt;
}

std::vector<std::string> Dataset::column_names() const {
  std::vector<std::string> out;
  out.reserve(schemas_.size());
  for (const auto& s : schemas_) out.push_back(s.name);
  return out;
}

std::size_t Dataset::count_missing() const {
  std::size_t n = 0;
  for (const auto& row : rows_) {
    for (const auto& c : row) n += is_missing(c) ? 1 : 0;
  }
  return n;
}

bool Dataset::is_fully_numeric() const {
  for (const auto& row : rows_) {
    for (const auto& c : row) {
      const auto* d = std::get_if<double>(&c);
      if (d == nullptr || !std::isfinite(*d)) return false;
    }
  }
  return true;
}

Matrix Dataset::to_matrix() const {
  Matrix m(rows_.size(), schemas_.size());
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    for (std::size_t c = 0; c < schemas_.size(); ++c) {
      const auto* d = std::get_if<double>(&rows_[r][c]);
      if (d == nullptr || !std::isfinite(*d)) {
        throw DataError("row " + row_ids_[r] + ", column '" + schemas_[c].name +
                        "': not a finite number");
      }
      m(r, c) = *d;
    }
  }
  return m;
}

Dataset Dataset::select_rows(std::span<const std::size_t> indices) const {
  std::vector<std::vector<Cell>> rows;
  std::vector<std::string> ids;
  rows.reserve(indices.size());
  ids.reserve(indices.size());
  for (auto i : indices) {
    rows.push_back(rows_.at(i));
    ids.push_back(row_ids_.at(i));
  }
  return Dataset(schemas_, std::move(rows), std::move(ids));
}

void PreprocessReport::merge(const PreprocessReport& other) {
  for (const auto& [k, v] : other.imputed_counts) imputed_counts[k] = v;
  for (const auto& [k, v] : other.column_means) column_means[k] = v;
  for (const auto& [k, v] : other.encoding_map) encoding_map[k] = v;
  for (const auto& [k, v] : other.scaling_ranges) scaling_ranges[k] = v;
}

}  // namespace clif::tabular
