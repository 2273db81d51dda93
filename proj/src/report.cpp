#include "stokesrec/report.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace stokesrec {

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size())
    throw std::runtime_error("Table::add_row: ragged row of " + std::to_string(row.size()) +
                             " cells, expected " + std::to_string(columns.size()));
  rows.push_back(std::move(row));
}

std::string format_cell(const Cell& cell, ColumnKind kind) {
  char buf[64];
  if (std::holds_alternative<std::monostate>(cell)) return "-";
  if (const auto* s = std::get_if<std::string>(&cell)) return *s;
  if (const auto* i = std::get_if<long long>(&cell)) {
    std::snprintf(buf, sizeof buf, "%lld", *i);
    return buf;
  }
  const double v = std::get<double>(cell);
  switch (kind) {
    case ColumnKind::Eoc: std::snprintf(buf, sizeof buf, "%.3f", v); break;
    case ColumnKind::Integer: std::snprintf(buf, sizeof buf, "%.0f", v); break;
    default: std::snprintf(buf, sizeof buf, "%.5e", v); break;
  }
  return buf;
}

std::string emit_table(const Table& table, TableFormat format) {
  std::string out;
  const size_t nc = table.columns.size();
  const auto comment_prefix = format == TableFormat::Markdown ? "<!-- " : "# ";
  const auto comment_suffix = format == TableFormat::Markdown ? " -->\n" : "\n";
  for (const auto& c : table.header_comments) out += comment_prefix + c + comment_suffix;

  if (format == TableFormat::Csv) {
    for (size_t j = 0; j < nc; ++j) out += table.columns[j].name + (j + 1 < nc ? "," : "\n");
    for (const auto& row : table.rows)
      for (size_t j = 0; j < nc; ++j)
        out += format_cell(row[j], table.columns[j].kind) + (j + 1 < nc ? "," : "\n");
    return out;
  }
  if (format == TableFormat::Dat) {
    out += "#";
    for (size_t j = 0; j < nc; ++j) out += " " + table.columns[j].name;
    out += "\n";
    for (const auto& row : table.rows) {
      for (size_t j = 0; j < nc; ++j)
        out += format_cell(row[j], table.columns[j].kind) + (j + 1 < nc ? " " : "\n");
    }
    return out;
  }
  // markdown
  for (size_t j = 0; j < nc; ++j)
    out += (j == 0 ? "| " : " ") + table.columns[j].name + " |";
  out += "\n";
  for (size_t j = 0; j < nc; ++j) out += (j == 0 ? "|" : "") + std::string("---|");
  out += "\n";
  for (const auto& row : table.rows) {
    for (size_t j = 0; j < nc; ++j)
      out += (j == 0 ? "| " : " ") + format_cell(row[j], table.columns[j].kind) + " |";
    out += "\n";
  }
  return out;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(std::move(cells));
  }
  return rows;
}

}  // namespace stokesrec
