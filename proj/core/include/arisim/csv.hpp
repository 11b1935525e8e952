#pragma once

#include <string>
#include <utility>
#include <vector>

// Result tables with unit-annotated columns and deterministic CSV emission.
namespace arisim::csv {

struct Column {
  std::string name;
  std::string unit;  // "-" for dimensionless
};

struct ResultTable {
  std::vector<Column> columns;
  std::vector<std::vector<double>> rows;
  // Key/value lines written as leading '#' comments, in insertion order.
  std::vector<std::pair<std::string, std::string>> metadata;

  void add_metadata(std::string key, std::string value) {
    metadata.emplace_back(std::move(key), std::move(value));
  }
  // Throws ConfigError when the row width differs from the column count.
  void add_row(std::vector<double> row);
};

// Header cells are "name[unit]"; numeric cells use full-precision scientific
// notation so a round-trip parse recovers every double bit-exactly.
std::string render_csv(const ResultTable& table);

// Writes render_csv(table) to path; parent directory must exist. Throws
// IoError on failure.
void emit_csv(const ResultTable& table, const std::string& path);

// Inverse of render_csv for verification: reads '#' metadata, the header,
// and numeric rows. Throws ConfigError on malformed input.
ResultTable parse_csv(const std::string& text);

}  // namespace arisim::csv
