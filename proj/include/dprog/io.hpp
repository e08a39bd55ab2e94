#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace dprog::io {

/// Shortest decimal string that parses back to exactly `x`.
std::string format_double(double x);

double parse_double(std::string_view s);

/// Writes via a temporary sibling file and rename, so readers never see a
/// partially written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

/// Minimal RFC-4180 table: header row plus data rows, CRLF-free.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string to_string() const;
  static CsvTable parse(std::string_view text);

  /// Column index of `name`; throws Io when absent.
  std::size_t column(std::string_view name) const;
};

std::string csv_escape(std::string_view field);

}  // namespace dprog::io
