#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace namegame::csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  // 1-based line number of each row in the source file (header is line 1).
  std::vector<std::size_t> line_numbers;
};

// Splits a single CSV line. Handles double-quoted fields with embedded
// commas and "" escapes; does not support embedded newlines.
std::vector<std::string> split_line(std::string_view line);

Table read(std::istream& in);
Table read_file(const std::filesystem::path& path);

std::string escape_field(std::string_view field);
void write_row(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace namegame::csv
