#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace snkb {

/// Shortest round-trip decimal representation ('.' decimal point, no
/// locale). Identical inputs always format to identical bytes.
std::string format_double(double value);
std::string format_int(std::int64_t value);

/// RFC-4180-style writer: header row, comma separators, quoting only when
/// a field needs it, LF line endings.
class CsvWriter {
 public:
  explicit CsvWriter(const std::filesystem::path& path);

  void header(const std::vector<std::string>& columns);
  void row(const std::vector<std::string>& fields);

 private:
  void write_line(const std::vector<std::string>& fields);
  std::ofstream out_;
};

}  // namespace snkb
