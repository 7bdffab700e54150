#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace cic::io {

struct CsvRow {
  std::size_t line = 0;
  std::vector<std::string> fields;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<CsvRow> rows;

  // Column index by name; throws ConfigError when absent.
  std::size_t column(const std::string& name) const;
};

// Plain comma-separated values without quoting. Every row must have as
// many fields as the header (ConfigError naming the line otherwise).
CsvTable parse_csv(const std::string& text, const std::string& source = "csv");
CsvTable read_csv(const std::string& path);

std::string csv_line(const std::vector<std::string>& fields);
// Appends one row, writing the header first when the file is new or empty.
void append_csv_row(const std::string& path, const std::vector<std::string>& header,
                    const std::vector<std::string>& row);

std::string format_number(double v);

}  // namespace cic::io
