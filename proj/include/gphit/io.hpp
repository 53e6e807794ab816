#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace gphit {

// Report cell: string or double; doubles render with 17 significant digits so
// CSV and JSON round-trip bit-exactly.
using ReportCell = std::variant<std::string, double, std::int64_t>;

struct ReportTable {
  std::vector<std::pair<std::string, std::string>> metadata;  // key -> value
  std::vector<std::string> columns;
  std::vector<std::vector<ReportCell>> rows;
};

std::string format_double17(double v);

// FNV-1a (64-bit) over the canonical config string; embedded in report
// metadata so an artifact pins the exact configuration that produced it.
std::uint64_t config_hash(const std::string& canonical_config);

std::string render_csv(const ReportTable& table);
std::string render_json(const ReportTable& table);

// format is "csv" or "json"; writes atomically-ish (temp + rename not needed
// here, plain write) and throws std::runtime_error on IO failure.
void write_report(const ReportTable& table, const std::string& format,
                  const std::string& path);

} // namespace gphit
