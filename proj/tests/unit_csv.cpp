#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>

#include "arisim/csv.hpp"
#include "arisim/errors.hpp"

using namespace arisim;

namespace {

std::uint64_t bits_of(double x) {
  std::uint64_t u;
  std::memcpy(&u, &x, sizeof(u));
  return u;
}

csv::ResultTable sample_table() {
  csv::ResultTable t;
  t.columns = {{"x", "-"}, {"p", "dBm"}, {"r", "bits/s/Hz"}};
  t.add_metadata("experiment", "demo");
  t.add_metadata("note", "value: with a colon");
  t.add_row({1.0, -3.5, 0.1});
  t.add_row({2.0, 7.25, 123456.789012345678});
  return t;
}

}  // namespace

TEST_SUITE("csv") {

TEST_CASE("row width is enforced") {
  csv::ResultTable t;
  t.columns = {{"a", "-"}, {"b", "-"}};
  CHECK_NOTHROW(t.add_row({1.0, 2.0}));
  CHECK_THROWS_AS(t.add_row({1.0}), ConfigError);
  CHECK_THROWS_AS(t.add_row({1.0, 2.0, 3.0}), ConfigError);
}

TEST_CASE("rendering is deterministic and carries units plus metadata") {
  csv::ResultTable t = sample_table();
  std::string a = csv::render_csv(t);
  std::string b = csv::render_csv(t);
  CHECK(a == b);
  CHECK(a.find("# experiment: demo\n") != std::string::npos);
  CHECK(a.find("x[-],p[dBm],r[bits/s/Hz]\n") != std::string::npos);
  // Metadata precedes the header which precedes the data.
  CHECK(a.find('#') < a.find("x[-]"));
  CHECK(a.find("x[-]") < a.find("e+00"));
}

TEST_CASE("round trip recovers every double bit-exactly") {
  csv::ResultTable t;
  t.columns = {{"v", "-"}};
  const double vals[] = {0.0,
                         -0.0,
                         1.0 / 3.0,
                         -1.2345678901234567e-308,
                         5e-324,  // smallest denormal
                         1e-300,
                         1.7976931348623157e308,
                         -42.0,
                         6.022518621603296e-11};
  for (double v : vals) t.add_row({v});
  csv::ResultTable back = csv::parse_csv(csv::render_csv(t));
  REQUIRE(back.rows.size() == std::size(vals));
  for (size_t i = 0; i < std::size(vals); ++i) {
    CHECK(bits_of(back.rows[i][0]) == bits_of(vals[i]));
  }
  // Non-finite cells survive as the same category (NaN has no bit identity).
  csv::ResultTable nan_table;
  nan_table.columns = {{"v", "-"}};
  nan_table.add_row({std::numeric_limits<double>::quiet_NaN()});
  nan_table.add_row({std::numeric_limits<double>::infinity()});
  csv::ResultTable nan_back = csv::parse_csv(csv::render_csv(nan_table));
  CHECK(std::isnan(nan_back.rows[0][0]));
  CHECK(std::isinf(nan_back.rows[1][0]));
  CHECK(nan_back.rows[1][0] > 0);
}

TEST_CASE("round trip preserves structure and metadata order") {
  csv::ResultTable t = sample_table();
  csv::ResultTable back = csv::parse_csv(csv::render_csv(t));
  REQUIRE(back.columns.size() == 3);
  CHECK(back.columns[1].name == "p");
  CHECK(back.columns[1].unit == "dBm");
  CHECK(back.columns[2].unit == "bits/s/Hz");
  REQUIRE(back.metadata.size() == 2);
  CHECK(back.metadata[0].first == "experiment");
  CHECK(back.metadata[0].second == "demo");
  CHECK(back.metadata[1].second == "value: with a colon");
  REQUIRE(back.rows.size() == 2);
  // A second render of the parsed table reproduces the bytes.
  CHECK(csv::render_csv(back) == csv::render_csv(t));
}

TEST_CASE("empty-table edge cases") {
  csv::ResultTable t;
  t.columns = {{"only", "-"}};
  csv::ResultTable back = csv::parse_csv(csv::render_csv(t));
  CHECK(back.columns.size() == 1);
  CHECK(back.rows.empty());
  csv::ResultTable none;  // no columns at all: nothing to parse back
  CHECK_THROWS_AS(csv::parse_csv(csv::render_csv(none)), ConfigError);
}

TEST_CASE("malformed input is rejected") {
  CHECK_THROWS_AS(csv::parse_csv(""), ConfigError);
  CHECK_THROWS_AS(csv::parse_csv("x,y\n1,2\n"), ConfigError);  // no units
  CHECK_THROWS_AS(csv::parse_csv("x[-]\nabc\n"), ConfigError);
  CHECK_THROWS_AS(csv::parse_csv("x[-],y[-]\n1.0\n"), ConfigError);
  CHECK_THROWS_AS(csv::parse_csv("# broken metadata line\nx[-]\n1\n"),
                  ConfigError);
}

TEST_CASE("file emission and I/O failures") {
  csv::ResultTable t = sample_table();
  std::filesystem::path dir =
      std::filesystem::temp_directory_path() / "arisim_csv_test";
  std::filesystem::create_directories(dir);
  std::filesystem::path file = dir / "table.csv";
  csv::emit_csv(t, file.string());
  std::ifstream in(file, std::ios::binary);
  std::string content((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
  CHECK(content == csv::render_csv(t));
  CHECK_THROWS_AS(
      csv::emit_csv(t, (dir / "missing_subdir" / "t.csv").string()), IoError);
  std::filesystem::remove_all(dir);
}

}  // TEST_SUITE("csv")
