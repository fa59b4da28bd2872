#include "dualsmooth/csv_io.hpp"

#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace dualsmooth::csv {

int Table::column(const std::string& name) const {
  for (size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<int>(i);
  return -1;
}

void write(const std::string& path, const std::vector<std::string>& header,
           const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("csv::write: cannot open " + path);
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (size_t i = 0; i < header.size(); ++i)
    out << header[i] << (i + 1 < header.size() ? "," : "");
  out << "\n";
  for (const auto& row : rows) {
    if (row.size() != header.size())
      throw std::invalid_argument("csv::write: row width does not match header");
    for (size_t i = 0; i < row.size(); ++i)
      out << row[i] << (i + 1 < row.size() ? "," : "");
    out << "\n";
  }
  if (!out) throw std::runtime_error("csv::write: write failed for " + path);
}

Table read(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("csv::read: cannot open " + path);
  Table table;
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("csv::read: empty file " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::stringstream hs(line);
  std::string cell;
  while (std::getline(hs, cell, ',')) table.header.push_back(cell);
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ls(line);
    while (std::getline(ls, cell, ',')) {
      try {
        size_t pos = 0;
        row.push_back(std::stod(cell, &pos));
        if (pos != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw std::runtime_error("csv::read: " + path + ":" +
                                 std::to_string(line_no) +
                                 ": not a number: '" + cell + "'");
      }
    }
    if (row.size() != table.header.size())
      throw std::runtime_error("csv::read: " + path + ":" +
                               std::to_string(line_no) + ": expected " +
                               std::to_string(table.header.size()) + " cells");
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::vector<double> read_column(const std::string& path, const std::string& name) {
  const Table table = read(path);
  int col = 0;
  if (!name.empty()) {
    col = table.column(name);
    if (col < 0)
      throw std::runtime_error("csv::read_column: no column '" + name + "' in " + path);
  } else if (table.header.size() != 1) {
    throw std::runtime_error("csv::read_column: " + path +
                             " has several columns; name one");
  }
  std::vector<double> out;
  out.reserve(table.rows.size());
  for (const auto& row : table.rows) out.push_back(row[col]);
  return out;
}

}  // namespace dualsmooth::csv
