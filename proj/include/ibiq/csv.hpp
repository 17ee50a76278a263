#pragma once

#include <string>
#include <vector>

namespace ibiq {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// Quotes a field when it contains a comma, quote, CR or LF.
std::string csv_escape(const std::string& field);
std::string format_double(double v);

void write_csv(const CsvTable& table, const std::string& path);
std::string to_csv_string(const CsvTable& table);
CsvTable parse_csv(const std::string& text);
CsvTable read_csv(const std::string& path);

}  // namespace ibiq
