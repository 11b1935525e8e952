#include "arisim/csv.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include "arisim/errors.hpp"

namespace arisim::csv {

void ResultTable::add_row(std::vector<double> row) {
  if (row.size() != columns.size()) {
    throw ConfigError("ResultTable: row has " + std::to_string(row.size()) +
                      " cells, table has " + std::to_string(columns.size()) +
                      " columns");
  }
  rows.push_back(std::move(row));
}

std::string render_csv(const ResultTable& table) {
  std::string out;
  for (const auto& [key, value] : table.metadata) {
    out += "# " + key + ": " + value + "\n";
  }
  for (size_t c = 0; c < table.columns.size(); ++c) {
    if (c) out += ',';
    out += table.columns[c].name + "[" + table.columns[c].unit + "]";
  }
  out += '\n';
  char buf[40];
  for (const auto& row : table.rows) {
    for (size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      std::snprintf(buf, sizeof(buf), "%.17e", row[c]);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

void emit_csv(const ResultTable& table, const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) {
    throw IoError("cannot open '" + path + "' for writing: " +
                  std::strerror(errno));
  }
  f << render_csv(table);
  f.flush();
  if (!f) {
    throw IoError("write to '" + path + "' failed");
  }
}

ResultTable parse_csv(const std::string& text) {
  ResultTable t;
  std::istringstream in(text);
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::string body = line.substr(1);
      size_t colon = body.find(':');
      if (colon == std::string::npos) {
        throw ConfigError("metadata line without ':': " + line);
      }
      auto trim = [](std::string s) {
        size_t a = s.find_first_not_of(" \t");
        size_t b = s.find_last_not_of(" \t");
        return a == std::string::npos ? std::string()
                                      : s.substr(a, b - a + 1);
      };
      t.add_metadata(trim(body.substr(0, colon)), trim(body.substr(colon + 1)));
      continue;
    }
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!header_seen) {
      for (const auto& h : cells) {
        size_t lb = h.find('[');
        if (lb == std::string::npos || h.back() != ']') {
          throw ConfigError("header cell without [unit]: " + h);
        }
        t.columns.push_back(
            {h.substr(0, lb), h.substr(lb + 1, h.size() - lb - 2)});
      }
      header_seen = true;
      continue;
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) {
      char* end = nullptr;
      double v = std::strtod(c.c_str(), &end);
      if (end == c.c_str()) {
        throw ConfigError("non-numeric cell: " + c);
      }
      row.push_back(v);
    }
    t.add_row(std::move(row));
  }
  if (!header_seen) {
    throw ConfigError("CSV text has no header row");
  }
  return t;
}

}  // namespace arisim::csv
