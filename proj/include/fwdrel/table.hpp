#pragma once

#include <string>
#include <vector>

namespace fwdrel {

/// Numeric table with named columns; the first column is time.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add_row(std::vector<double> row);
  /// Header row then one line per row; numbers round-trip (%.17g).
  std::string to_csv() const;
};

}  // namespace fwdrel
