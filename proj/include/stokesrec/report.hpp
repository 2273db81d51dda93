// Deterministic table serialization: CSV, markdown and whitespace .dat.
#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace stokesrec {

enum class ColumnKind { Integer, Error, Eoc, Text };

struct Column {
  std::string name;
  ColumnKind kind = ColumnKind::Text;
};

using Cell = std::variant<std::monostate, long long, double, std::string>;

struct Table {
  std::vector<Column> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<std::string> header_comments;  // config hash, tolerances

  void add_row(std::vector<Cell> row);
};

// errors in 6-significant-digit scientific notation, eoc with 3 decimals
std::string format_cell(const Cell& cell, ColumnKind kind);

enum class TableFormat { Csv, Markdown, Dat };

std::string emit_table(const Table& table, TableFormat format);

// parses the CSV emitted above (comments skipped); used as a round-trip check
std::vector<std::vector<std::string>> parse_csv(const std::string& text);

}  // namespace stokesrec
