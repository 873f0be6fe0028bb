#pragma once

// Small builders shared by the unit tests.

#include <string>
#include <vector>

#include "clif/matrix.hpp"
#include "clif/tabular.hpp"

namespace fixture {

// Fully numeric dataset; ids are row numbers.
inline clif::tabular::Dataset numeric_dataset(const std::vector<std::string>& names,
                                              const std::vector<std::vector<double>>& rows) {
  std::vector<clif::tabular::ColumnSchema> schemas;
  for (const auto& n : names) {
    clif::tabular::ColumnSchema s;
    s.name = n;
    const auto eq = n.find('=');
    if (eq != std::string::npos) s.derived_from = n.substr(0, eq);
    schemas.push_back(s);
  }
  std::vector<std::vector<clif::tabular::Cell>> cells;
  std::vector<std::string> ids;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::vector<clif::tabular::Cell> row;
    for (double v : rows[r]) row.emplace_back(v);
    cells.push_back(std::move(row));
    ids.push_back(std::to_string(r));
  }
  return clif::tabular::Dataset(std::move(schemas), std::move(cells), std::move(ids));
}

inline clif::Matrix matrix(const std::vector<std::vector<double>>& rows) {
  clif::Matrix m(rows.size(), rows.empty() ? 0 : rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
  }
  return m;
}

inline std::vector<std::vector<double>> to_rows(const clif::Matrix& m) {
  std::vector<std::vector<double>> out(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) out[r].assign(m.row(r).begin(), m.row(r).end());
  return out;
}

}  // namespace fixture
