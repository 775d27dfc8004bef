#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "snkb/csv.hpp"

using namespace snkb;

TEST_CASE("format_double: shortest round-trip representation") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(2000.0) == "2000");
  CHECK(format_double(-0.5) == "-0.5");
  CHECK(format_double(1.0 / 3.0) == "0.3333333333333333");
  // round-trip exactness on awkward values
  for (double v : {1e-300, 3.141592653589793, 0.49999999999999994, 6.02e23}) {
    CHECK(std::stod(format_double(v)) == v);
    CHECK(std::stod(format_double(-v)) == -v);
  }
}

TEST_CASE("CsvWriter: separators, quoting, LF endings") {
  const auto path = std::filesystem::temp_directory_path() / "snkb_csv_test.csv";
  {
    CsvWriter csv(path);
    csv.header({"a", "b"});
    csv.row({"plain", "with,comma"});
    csv.row({"with\"quote", "x"});
  }
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == "a,b\nplain,\"with,comma\"\n\"with\"\"quote\",x\n");
  std::filesystem::remove(path);
}
