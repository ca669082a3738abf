#include "chirail/csv.hpp"

#include <algorithm>

#include "chirail/error.hpp"

namespace chirail {

int DelimitedTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  return -1;
}

namespace {

char detect_delimiter(std::string_view text) {
  // Count candidate delimiters in the header row, outside quotes.
  std::size_t commas = 0, tabs = 0;
  bool in_quotes = false;
  for (char c : text) {
    if (c == '"') in_quotes = !in_quotes;
    if (in_quotes) continue;
    if (c == '\n') break;
    if (c == ',') ++commas;
    if (c == '\t') ++tabs;
  }
  return tabs > commas ? '\t' : ',';
}

}  // namespace

DelimitedTable parse_delimited(std::string_view text) {
  if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) {
    throw InputError("input table is empty");
  }
  DelimitedTable table;
  table.delimiter = detect_delimiter(text);

  std::vector<std::string> row;
  std::string cell;
  bool in_quotes = false;
  bool row_has_content = false;

  auto end_cell = [&] {
    row.push_back(std::move(cell));
    cell.clear();
  };
  auto end_row = [&] {
    end_cell();
    if (table.header.empty()) {
      table.header = std::move(row);
    } else {
      table.rows.push_back(std::move(row));
    }
    row.clear();
    row_has_content = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          cell += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        cell += c;
      }
      continue;
    }
    if (c == '"') {
      in_quotes = true;
      row_has_content = true;
    } else if (c == table.delimiter) {
      end_cell();
      row_has_content = true;
    } else if (c == '\r') {
      // swallowed; \r\n handled at \n
    } else if (c == '\n') {
      if (row_has_content || !cell.empty() || !row.empty()) end_row();
    } else {
      cell += c;
      row_has_content = true;
    }
  }
  if (in_quotes) throw InputError("unterminated quoted cell");
  if (row_has_content || !cell.empty() || !row.empty()) end_row();

  if (table.header.empty()) throw InputError("input table has no header row");
  return table;
}

std::string csv_escape(std::string_view cell, char delimiter) {
  const bool needs_quotes =
      cell.find_first_of(std::string{'"', '\n', '\r', delimiter}) !=
      std::string_view::npos;
  if (!needs_quotes) return std::string(cell);
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace chirail
