#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace trustsim {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  bool operator==(const CsvTable&) const = default;
};

// RFC 4180 quoting; fields with commas, quotes or newlines are quoted.
std::string EmitCsv(const CsvTable& table);
CsvTable ParseCsv(const std::string& text);

void WriteCsv(const std::filesystem::path& path, const CsvTable& table);
CsvTable ReadCsv(const std::filesystem::path& path);

// Shortest representation that parses back to the same double.
std::string FormatDouble(double v);
double ParseDouble(const std::string& s);

}  // namespace trustsim
