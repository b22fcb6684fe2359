#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ddscope {

// Root-finding bracket does not straddle the root.
class bracket_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Normal matrix of a least-squares problem is singular at the start point,
// i.e. at least one parameter has no effect on the residuals.
class degenerate_fit_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// CSV/dataset parse failure with row/column location (1-based, row 1 = header).
class parse_error : public std::runtime_error {
 public:
  parse_error(const std::string& what, std::size_t row, std::size_t column)
      : std::runtime_error(what + " (row " + std::to_string(row) + ", column " +
                           std::to_string(column) + ")"),
        row_(row),
        column_(column) {}

  std::size_t row() const { return row_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t row_;
  std::size_t column_;
};

}  // namespace ddscope
