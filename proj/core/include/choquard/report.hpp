#pragma once

#include <choquard/config.hpp>

#include <nlohmann/json.hpp>

#include <iosfwd>
#include <string>

namespace choquard {

inline constexpr const char* artifact_version = "0.1.0";

struct RunReport {
  std::string command;
  nlohmann::json config;       // resolved configuration
  nlohmann::json results;      // per-command payload
  nlohmann::json diagnostics;  // saturation flags, truncation errors, optional timings
  std::string version = artifact_version;
  int exit_code = 0;
};

nlohmann::json to_json(const RunReport& report);
RunReport report_from_json(const nlohmann::json& doc);

/// JSON: one document. CSV: "path,value" rows for every scalar leaf, arrays
/// indexed by position; floating-point values with 17 significant digits.
void write_report(const RunReport& report, OutputFormat format, std::ostream& out);
std::string format_report(const RunReport& report, OutputFormat format);

/// Round-trippable decimal with 17 significant digits.
std::string format_double(double value);

}  // namespace choquard
