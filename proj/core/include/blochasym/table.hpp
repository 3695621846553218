#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace blochasym {

// Column-named result table; CSV cells are preformatted strings so that CSV
// and JSON emission mirror each other field for field.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row) { rows.push_back(std::move(row)); }
};

std::string format_g17(double v);

// RFC-4180 style: comma separator, '.' decimals, header row, quoting only
// when a cell needs it.
void write_csv(std::ostream& out, const Table& table);

// One document per run: {schema_version, command, columns, rows}.
void write_json(std::ostream& out, const Table& table, const std::string& command,
                int schema_version = 1);

}  // namespace blochasym
