#pragma once

#include <string>
#include <vector>

namespace dualsmooth::csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  int column(const std::string& name) const;  // -1 when absent
};

// Headered numeric CSV, round-trip-exact doubles (max_digits10).
void write(const std::string& path, const std::vector<std::string>& header,
           const std::vector<std::vector<double>>& rows);

Table read(const std::string& path);

// Single numeric column; by name when the table has several.
std::vector<double> read_column(const std::string& path,
                                const std::string& name = "");

}  // namespace dualsmooth::csv
