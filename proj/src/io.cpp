#include "gphit/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace gphit {

std::string format_double17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::uint64_t config_hash(const std::string& canonical_config) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : canonical_config) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

namespace {

std::string cell_to_string(const ReportCell& cell) {
  if (std::holds_alternative<std::string>(cell)) return std::get<std::string>(cell);
  if (std::holds_alternative<double>(cell))
    return format_double17(std::get<double>(cell));
  return std::to_string(std::get<std::int64_t>(cell));
}

} // namespace

std::string render_csv(const ReportTable& table) {
  std::ostringstream os;
  for (const auto& [k, v] : table.metadata) os << "# " << k << "=" << v << "\n";
  for (std::size_t c = 0; c < table.columns.size(); ++c)
    os << (c ? "," : "") << table.columns[c];
  os << "\n";
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c)
      os << (c ? "," : "") << cell_to_string(row[c]);
    os << "\n";
  }
  return os.str();
}

std::string render_json(const ReportTable& table) {
  nlohmann::json j;
  for (const auto& [k, v] : table.metadata) j["metadata"][k] = v;
  j["columns"] = table.columns;
  auto rows = nlohmann::json::array();
  for (const auto& row : table.rows) {
    auto r = nlohmann::json::array();
    for (const auto& cell : row) {
      // Floats rendered as strings keep the 17-digit contract identical
      // across both formats.
      r.push_back(cell_to_string(cell));
    }
    rows.push_back(r);
  }
  j["rows"] = rows;
  return j.dump(2) + "\n";
}

void write_report(const ReportTable& table, const std::string& format,
                  const std::string& path) {
  std::string body;
  if (format == "csv")
    body = render_csv(table);
  else if (format == "json")
    body = render_json(table);
  else
    throw std::invalid_argument("write_report: format must be csv or json");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_report: cannot open " + path);
  out << body;
  if (!out) throw std::runtime_error("write_report: write failed for " + path);
}

} // namespace gphit
