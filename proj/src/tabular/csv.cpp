#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "clif/error.hpp"
#include "clif/tabular.hpp"

namespace clif::tabular {
namespace {

std::string location(std::string_view source, std::size_t line) {
  return std::string(source) + ":" + std::to_string(line);
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.emplace_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::optional<double> parse_number(std::string_view token) {
  token = trim(token);
  if (token.empty()) return std::nullopt;
  if (token.front() == '+') token.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size()) return std::nullopt;
  return value;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(path.string() + ": cannot open file");
  return in;
}

std::string format_number(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace

std::vector<CsvRecord> read_csv_records(std::istream& in, std::string_view source) {
  std::vector<CsvRecord> records;
  std::string buffer((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  // UTF-8 byte order mark
  std::size_t i = 0;
  if (buffer.size() >= 3 && buffer.compare(0, 3, "\xEF\xBB\xBF") == 0) i = 3;

  std::size_t line = 1;
  CsvRecord current;
  current.line = line;
  std::string field;
  bool in_quotes = false;
  bool field_was_quoted = false;
  bool record_has_content = false;

  auto end_field = [&] {
    current.fields.push_back(std::move(field));
    field.clear();
    field_was_quoted = false;
  };
  auto end_record = [&] {
    end_field();
    records.push_back(std::move(current));
    current = CsvRecord{};
    record_has_content = false;
  };

  for (; i < buffer.size(); ++i) {
    const char c = buffer[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < buffer.size() && buffer[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field.empty() || field_was_quoted) {
          throw DataError(location(source, line) + ": stray quote inside unquoted field");
        }
        in_quotes = true;
        field_was_quoted = true;
        record_has_content = true;
        break;
      case ',':
        end_field();
        record_has_content = true;
        break;
      case '\r':
        if (i + 1 < buffer.size() && buffer[i + 1] == '\n') break;
        [[fallthrough]];
      case '\n':
        if (record_has_content || !field.empty() || !current.fields.empty()) end_record();
        ++line;
        current.line = line;
        break;
      default:
        field.push_back(c);
        record_has_content = true;
    }
  }
  if (in_quotes) throw DataError(location(source, current.line) + ": unterminated quoted field");
  if (record_has_content || !field.empty() || !current.fields.empty()) end_record();
  return records;
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

// ---- Schema ------------------------------------------------------------

std::vector<ColumnSchema> parse_schema(std::string_view text, std::string_view source) {
  std::vector<ColumnSchema> out;
  std::unordered_set<std::string> seen;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = trim(text.substr(start, end - start));
    ++line_no;
    start = end + 1;
    if (line.empty() || line.front() == '#') continue;

    const auto first = line.find(',');
    if (first == std::string_view::npos) {
      throw DataError(location(source, line_no) + ": expected 'name,kind[,codes]'");
    }
    ColumnSchema col;
    col.name = std::string(trim(line.substr(0, first)));
    std::string_view rest = line.substr(first + 1);
    const auto second = rest.find(',');
    const std::string_view kind = trim(rest.substr(0, second));
    if (kind == "numerical") {
      col.kind = ColumnKind::numerical;
    } else if (kind == "categorical") {
      col.kind = ColumnKind::categorical;
    } else {
      throw DataError(location(source, line_no) + ": unknown column kind '" + std::string(kind) +
                      "' (expected numerical or categorical)");
    }
    if (second != std::string_view::npos) {
      for (auto& code : split(rest.substr(second + 1), ';')) {
        if (!code.empty()) col.missing_codes.insert(std::move(code));
      }
    }
    if (col.name.empty()) throw DataError(location(source, line_no) + ": empty column name");
    if (!seen.insert(col.name).second) {
      throw DataError(location(source, line_no) + ": duplicate column '" + col.name + "'");
    }
    out.push_back(std::move(col));
  }
  return out;
}

std::vector<ColumnSchema> load_schema(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_schema(ss.str(), path.string());
}

std::string format_schema(std::span<const ColumnSchema> schemas) {
  std::string out;
  for (const auto& s : schemas) {
    out += s.name;
    out += ',';
    out += to_string(s.kind);
    if (!s.missing_codes.empty()) {
      out += ',';
      bool first = true;
      for (const auto& code : s.missing_codes) {
        if (!first) out += ';';
        out += code;
        first = false;
      }
    }
    out += '\n';
  }
  return out;
}

// ---- Raw tables --------------------------------------------------------

Dataset parse_csv(std::istream& in, std::span<const ColumnSchema> schema,
                  const LoadOptions& options, std::string_view source) {
  const auto records = read_csv_records(in, source);
  if (records.empty()) throw DataError(std::string(source) + ": missing header row");
  const auto& header = records.front().fields;

  auto find_header = [&](const std::string& name) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (trim(header[i]) == name) return i;
    }
    return std::nullopt;
  };

  std::vector<std::size_t> source_cols;
  for (const auto& col : schema) {
    auto idx = find_header(col.name);
    if (!idx) {
      throw DataError(location(source, records.front().line) + ": schema column '" + col.name +
                      "' not found in header");
    }
    source_cols.push_back(*idx);
  }
  std::optional<std::size_t> id_col;
  if (options.id_column) {
    id_col = find_header(*options.id_column);
    if (!id_col) {
      throw DataError(location(source, records.front().line) + ": id column '" +
                      *options.id_column + "' not found in header");
    }
  }

  std::vector<std::vector<Cell>> rows;
  std::vector<std::string> ids;
  rows.reserve(records.size() - 1);
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.fields.size() != header.size()) {
      throw DataError(location(source, rec.line) + ": expected " + std::to_string(header.size()) +
                      " fields, found " + std::to_string(rec.fields.size()));
    }
    std::vector<Cell> row;
    row.reserve(schema.size());
    for (std::size_t c = 0; c < schema.size(); ++c) {
      const auto& col = schema[c];
      const std::string& token = rec.fields[source_cols[c]];
      if (col.is_missing_token(token)) {
        row.emplace_back(std::monostate{});
      } else if (col.kind == ColumnKind::numerical) {
        auto v = parse_number(token);
        if (!v) {
          throw DataError(location(source, rec.line) + ": column '" + col.name +
                          "': non-numeric value '" + token + "'");
        }
        row.emplace_back(*v);
      } else {
        row.emplace_back(std::string(trim(token)));
      }
    }
    rows.push_back(std::move(row));
    ids.push_back(id_col ? std::string(trim(rec.fields[*id_col])) : std::to_string(r - 1));
  }
  try {
    return Dataset(std::vector<ColumnSchema>(schema.begin(), schema.end()), std::move(rows),
                   std::move(ids));
  } catch (const DataError& e) {
    throw DataError(std::string(source) + ": " + e.what());
  }
}

Dataset load_csv(const std::filesystem::path& path, std::span<const ColumnSchema> schema,
                 const LoadOptions& options) {
  auto in = open_input(path);
  return parse_csv(in, schema, options, path.string());
}

void write_csv(const Dataset& ds, std::ostream& out) {
  out << "row_id";
  for (const auto& s : ds.schemas()) out << ',' << csv_escape(s.name);
  out << '\n';
  for (std::size_t r = 0; r < ds.n_rows(); ++r) {
    out << csv_escape(ds.row_ids()[r]);
    for (const auto& cell : ds.rows()[r]) {
      out << ',';
      if (const auto* d = std::get_if<double>(&cell)) {
        out << format_number(*d);
      } else if (const auto* s = std::get_if<std::string>(&cell)) {
        out << csv_escape(*s);
      }
    }
    out << '\n';
  }
}

void write_csv(const Dataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(path.string() + ": cannot open for writing");
  write_csv(ds, out);
}

// ---- Encoded tables ----------------------------------------------------

Dataset parse_encoded_csv(std::istream& in, const PreprocessReport* report,
                          std::string_view source) {
  const auto records = read_csv_records(in, source);
  if (records.empty()) throw DataError(std::string(source) + ": missing header row");
  const auto& header = records.front().fields;
  if (header.empty() || trim(header.front()) != "row_id") {
    throw DataError(location(source, records.front().line) + ": first column must be row_id");
  }

  std::map<std::string, std::string> derived;
  if (report != nullptr) {
    for (const auto& [orig, cols] : report->encoding_map) {
      for (const auto& c : cols) derived.emplace(c, orig);
    }
  }

  std::vector<ColumnSchema> schemas;
  for (std::size_t i = 1; i < header.size(); ++i) {
    ColumnSchema s;
    s.name = std::string(trim(header[i]));
    s.kind = ColumnKind::numerical;
    if (report != nullptr) {
      if (auto it = derived.find(s.name); it != derived.end()) s.derived_from = it->second;
    } else if (const auto eq = s.name.find('='); eq != std::string::npos && eq > 0) {
      s.derived_from = s.name.substr(0, eq);
    }
    schemas.push_back(std::move(s));
  }

  std::vector<std::vector<Cell>> rows;
  std::vector<std::string> ids;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.fields.size() != header.size()) {
      throw DataError(location(source, rec.line) + ": expected " + std::to_string(header.size()) +
                      " fields, found " + std::to_string(rec.fields.size()));
    }
    std::vector<Cell> row;
    row.reserve(schemas.size());
    for (std::size_t c = 1; c < rec.fields.size(); ++c) {
      auto v = parse_number(rec.fields[c]);
      if (!v) {
        throw DataError(location(source, rec.line) + ": column '" + schemas[c - 1].name +
                        "': expected a number, found '" + rec.fields[c] + "'");
      }
      row.emplace_back(*v);
    }
    rows.push_back(std::move(row));
    ids.emplace_back(trim(rec.fields.front()));
  }
  try {
    return Dataset(std::move(schemas), std::move(rows), std::move(ids));
  } catch (const DataError& e) {
    throw DataError(std::string(source) + ": " + e.what());
  }
}

Dataset load_encoded_csv(const std::filesystem::path& path, const PreprocessReport* report) {
  auto in = open_input(path);
  return parse_encoded_csv(in, report, path.string());
}

}  // namespace clif::tabular
