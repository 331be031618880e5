#include "fwdrel/table.hpp"

#include <cstdio>

#include "fwdrel/market.hpp"

namespace fwdrel {

void Table::add_row(std::vector<double> row) {
  if (row.size() != columns.size()) throw InvalidInput("row width does not match the header");
  rows.push_back(std::move(row));
}

std::string Table::to_csv() const {
  std::string out;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) out += ',';
    out += columns[i];
  }
  out += '\n';
  char buf[32];
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      std::snprintf(buf, sizeof buf, "%.17g", row[i]);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

}  // namespace fwdrel
