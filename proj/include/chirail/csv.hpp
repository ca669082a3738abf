#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace chirail {

/// Parsed delimited table: header row plus data rows. Cells are unescaped.
struct DelimitedTable {
  char delimiter = ',';
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of a header column, or -1.
  int column(std::string_view name) const;
};

/// Parse RFC4180-style delimited text. The delimiter (comma or tab) is
/// auto-detected from the header row. Quoted cells may contain the delimiter,
/// doubled quotes and newlines. Throws InputError on an empty input or an
/// unterminated quote.
DelimitedTable parse_delimited(std::string_view text);

/// Quote a cell for CSV output if it needs quoting.
std::string csv_escape(std::string_view cell, char delimiter = ',');

}  // namespace chirail
