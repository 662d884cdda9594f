#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace findhccs::csv {

using Row = std::vector<std::string>;

// RFC 4180 reader: quoted fields may contain commas, doubled quotes and newlines.
// Returns false at end of input.
bool read_row(std::istream& in, Row& row);

std::vector<Row> read_all(std::istream& in);

std::string escape(std::string_view field);

void write_row(std::ostream& out, const Row& row);

// Shortest representation that round-trips.
std::string format_number(double value);

/// Header-indexed view over parsed rows.
class Table {
 public:
  explicit Table(std::istream& in);

  const Row& header() const { return header_; }
  const std::vector<Row>& rows() const { return rows_; }
  // Index of a required column; throws IoError naming the column when absent.
  std::size_t column(std::string_view name) const;
  // -1 when absent.
  long find_column(std::string_view name) const;

 private:
  Row header_;
  std::vector<Row> rows_;
};

}  // namespace findhccs::csv
