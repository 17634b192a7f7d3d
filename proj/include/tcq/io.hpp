#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace tcq {

// numeric CSV with one header row; lines starting with '#' are comments
struct csv_table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::size_t column(const std::string& name) const;  // throws data_error
  std::vector<double> values(const std::string& name) const;
  void require(const std::vector<std::string>& names) const;
};

csv_table parse_csv(std::string_view text, const std::string& origin = "<csv>");
csv_table read_csv(const std::filesystem::path& path);
std::string format_csv(const csv_table& t);
std::string format_number(double x);  // shortest text that reads back bit-exactly

std::string read_file(const std::filesystem::path& path);
// writes a sibling temporary and renames it over the target
void write_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace tcq
