#pragma once
// File emission for analysis reports: one JSON document with full-precision
// numbers, long-format CSV tables at six significant digits, and a short
// human-readable summary with percentages to one decimal.

#include <filesystem>
#include <string>

#include <json.hpp>

#include "pidcmp/analysis.hpp"

namespace pidcmp {

/// printf("%.6g"), the number format of every CSV table.
std::string format_g6(double v);

nlohmann::json to_json(const ConditionsReport& r);
nlohmann::json to_json(const SweepReport& r);
nlohmann::json to_json(const CcsReport& r);

/// Writes the report files into `dir`, creating it if needed. Throws
/// std::runtime_error when a file cannot be written.
void write_report(const ConditionsReport& r, const std::filesystem::path& dir);
void write_report(const SweepReport& r, const std::filesystem::path& dir);
void write_report(const CcsReport& r, const std::filesystem::path& dir);

}  // namespace pidcmp
