#include <choquard/report.hpp>

#include <choquard/errors.hpp>

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace choquard {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

nlohmann::json to_json(const RunReport& r) {
  return {{"command", r.command},
          {"config", r.config},
          {"results", r.results},
          {"diagnostics", r.diagnostics},
          {"version", r.version},
          {"exit_code", r.exit_code}};
}

RunReport report_from_json(const nlohmann::json& doc) {
  try {
    RunReport r;
    r.command = doc.at("command").get<std::string>();
    r.config = doc.at("config");
    r.results = doc.at("results");
    r.diagnostics = doc.at("diagnostics");
    r.version = doc.at("version").get<std::string>();
    r.exit_code = doc.at("exit_code").get<int>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::validation, std::string("malformed report: ") + e.what());
  }
}

namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

void flatten(const nlohmann::json& node, const std::string& path, std::ostream& out) {
  if (node.is_object()) {
    for (auto it = node.begin(); it != node.end(); ++it)
      flatten(*it, path.empty() ? it.key() : path + "." + it.key(), out);
  } else if (node.is_array()) {
    for (std::size_t k = 0; k < node.size(); ++k)
      flatten(node[k], path + "[" + std::to_string(k) + "]", out);
  } else {
    std::string value;
    if (node.is_number_float()) value = format_double(node.get<double>());
    else if (node.is_string()) value = node.get<std::string>();
    else value = node.dump();
    out << csv_escape(path) << ',' << csv_escape(value) << '\n';
  }
}

// nlohmann rejects non-finite numbers; they are emitted as strings.
nlohmann::json sanitize(const nlohmann::json& node) {
  if (node.is_object()) {
    nlohmann::json out = nlohmann::json::object();
    for (auto it = node.begin(); it != node.end(); ++it) out[it.key()] = sanitize(*it);
    return out;
  }
  if (node.is_array()) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& v : node) out.push_back(sanitize(v));
    return out;
  }
  if (node.is_number_float() && !std::isfinite(node.get<double>()))
    return format_double(node.get<double>());
  return node;
}

}  // namespace

void write_report(const RunReport& report, OutputFormat format, std::ostream& out) {
  const nlohmann::json doc = sanitize(to_json(report));
  if (format == OutputFormat::json) {
    out << doc.dump(2) << '\n';
  } else {
    out << "path,value\n";
    flatten(doc, "", out);
  }
}

std::string format_report(const RunReport& report, OutputFormat format) {
  std::ostringstream out;
  write_report(report, format, out);
  return out.str();
}

}  // namespace choquard
