#pragma once

// Mixed-type table ingestion and preprocessing: CSV loading against a column
// schema, imputation, one-hot encoding and min-max scaling.

#include <cstddef>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "clif/matrix.hpp"

namespace clif::tabular {

enum class ColumnKind { numerical, categorical };

std::string_view to_string(ColumnKind kind) noexcept;

/// Token used to fill categorical gaps (NHANES "missing" convention).
inline constexpr std::string_view kCategoricalFill = "777";

struct ColumnSchema {
  std::string name;
  ColumnKind kind = ColumnKind::numerical;
  /// Raw tokens meaning "missing". The empty cell is always missing.
  std::set<std::string> missing_codes;
  /// Set on binary indicator columns produced by one_hot_encode.
  std::optional<std::string> derived_from;

  bool is_missing_token(std::string_view token) const;
  bool is_binary_indicator() const noexcept { return derived_from.has_value(); }
};

using Cell = std::variant<std::monostate, double, std::string>;

inline bool is_missing(const Cell& c) noexcept { return std::holds_alternative<std::monostate>(c); }

/// Immutable table: schema'd columns, row-major cells and one external id per
/// row. Construction validates shape and id uniqueness.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::vector<ColumnSchema> schemas, std::vector<std::vector<Cell>> rows,
          std::vector<std::string> row_ids);

  const std::vector<ColumnSchema>& schemas() const noexcept { return schemas_; }
  const std::vector<std::vector<Cell>>& rows() const noexcept { return rows_; }
  const std::vector<std::string>& row_ids() const noexcept { return row_ids_; }

  std::size_t n_rows() const noexcept { return rows_.size(); }
  std::size_t n_cols() const noexcept { return schemas_.size(); }

  const Cell& cell(std::size_t row, std::size_t col) const { return rows_[row][col]; }
  std::optional<std::size_t> column_index(std::string_view name) const;
  std::vector<std::string> column_names() const;

  std::size_t count_missing() const;
  bool is_fully_numeric() const;

  /// Dense matrix of all columns. Throws DataError unless fully numeric.
  Matrix to_matrix() const;

  /// Subset of rows, order preserved as given.
  Dataset select_rows(std::span<const std::size_t> indices) const;

 private:
  std::vector<ColumnSchema> schemas_;
  std::vector<std::vector<Cell>> rows_;
  std::vector<std::string> row_ids_;
};

/// What each preprocessing stage did, kept so transformations can be audited
/// and reversed. Maps are keyed by original column name.
struct PreprocessReport {
  std::map<std::string, std::size_t> imputed_counts;
  std::map<std::string, double> column_means;
  std::map<std::string, std::vector<std::string>> encoding_map;
  std::map<std::string, std::pair<double, double>> scaling_ranges;

  /// Fold another stage's entries into this report.
  void merge(const PreprocessReport& other);
};

// ---- Schema files ------------------------------------------------------

/// Parses lines `name,kind[,code;code...]`. Blank lines and `#` comments are
/// skipped. `source` labels diagnostics.
std::vector<ColumnSchema> parse_schema(std::string_view text, std::string_view source = "<schema>");
std::vector<ColumnSchema> load_schema(const std::filesystem::path& path);
std::string format_schema(std::span<const ColumnSchema> schemas);

// ---- CSV ---------------------------------------------------------------

struct CsvRecord {
  std::vector<std::string> fields;
  std::size_t line = 0;  // 1-based line where the record starts
};

/// RFC 4180 reader: quoted fields, doubled quotes, embedded newlines, CRLF.
std::vector<CsvRecord> read_csv_records(std::istream& in, std::string_view source = "<csv>");

/// Quotes a field when it contains a comma, quote or line break.
std::string csv_escape(std::string_view field);

struct LoadOptions {
  /// Column providing row ids; when unset ids are the 0-based data row number.
  std::optional<std::string> id_column;
};

Dataset parse_csv(std::istream& in, std::span<const ColumnSchema> schema,
                  const LoadOptions& options = {}, std::string_view source = "<csv>");
Dataset load_csv(const std::filesystem::path& path, std::span<const ColumnSchema> schema,
                 const LoadOptions& options = {});

/// Writes `row_id,<columns...>`; numbers use round-trip precision.
void write_csv(const Dataset& ds, std::ostream& out);
void write_csv(const Dataset& ds, const std::filesystem::path& path);

/// Reads a fully numeric file written by write_csv (first column row_id).
/// Binary indicator columns are recognised from `report.encoding_map` when
/// given, otherwise from the `<column>=<value>` naming convention.
Dataset load_encoded_csv(const std::filesystem::path& path,
                         const PreprocessReport* report = nullptr);
Dataset parse_encoded_csv(std::istream& in, const PreprocessReport* report = nullptr,
                          std::string_view source = "<csv>");

// ---- Preprocessing -----------------------------------------------------

/// Categorical gaps become "777"; numerical gaps take the column mean.
std::pair<Dataset, PreprocessReport> impute(const Dataset& ds);

/// Replaces each categorical column, in place, by one `<name>=<value>` binary
/// column per distinct value, values in lexicographic order.
std::pair<Dataset, PreprocessReport> one_hot_encode(const Dataset& ds);

/// Maps original numerical columns to [0,1]; indicator columns untouched and
/// constant columns become all zeros.
std::pair<Dataset, PreprocessReport> scale_minmax(const Dataset& ds);

/// Inverse of the min-max map for one value.
double unscale(double scaled, std::pair<double, double> range) noexcept;

/// impute + one_hot_encode, with the merged report. Scaling ranges are also
/// recorded (the returned dataset itself stays unscaled).
std::pair<Dataset, PreprocessReport> preprocess(const Dataset& ds);

}  // namespace clif::tabular
