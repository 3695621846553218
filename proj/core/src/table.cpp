#include "blochasym/table.hpp"

#include <cstdio>
#include <ostream>

#include "json.hpp"

namespace blochasym {

std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::string csv_escape(const std::string& cell) {
  if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

nlohmann::json cell_to_json(const std::string& cell) {
  if (cell.empty()) return nullptr;
  char* end = nullptr;
  const double v = std::strtod(cell.c_str(), &end);
  if (end && *end == '\0') return v;
  if (cell == "true") return true;
  if (cell == "false") return false;
  return cell;
}

}  // namespace

void write_csv(std::ostream& out, const Table& table) {
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i) out << ",";
    out << csv_escape(table.columns[i]);
  }
  out << "\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ",";
      out << csv_escape(row[i]);
    }
    out << "\n";
  }
}

void write_json(std::ostream& out, const Table& table, const std::string& command,
                int schema_version) {
  nlohmann::json doc;
  doc["schema_version"] = schema_version;
  doc["command"] = command;
  doc["columns"] = table.columns;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : table.rows) {
    nlohmann::json obj;
    for (std::size_t i = 0; i < row.size() && i < table.columns.size(); ++i)
      obj[table.columns[i]] = cell_to_json(row[i]);
    rows.push_back(std::move(obj));
  }
  doc["rows"] = std::move(rows);
  out << doc.dump(2) << "\n";
}

}  // namespace blochasym
