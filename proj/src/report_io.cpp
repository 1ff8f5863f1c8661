#include <json.hpp>
#include <set>
#include <sstream>

#include "patrol/error.hpp"
#include "patrol/io.hpp"
#include "patrol/metrics.hpp"

namespace patrol {

using nlohmann::ordered_json;

namespace {
constexpr const char* kReportFormat = "patrol-coverage";
constexpr int kReportVersion = 1;

std::string psi_label(double psi) {
  // Integral psi values print without decimals: W_3, W_10.
  if (psi == static_cast<double>(static_cast<long long>(psi))) return std::to_string(static_cast<long long>(psi));
  std::ostringstream out;
  out << psi;
  return out.str();
}
}  // namespace

std::string serialize_report(const CoverageReport& report) {
  ordered_json doc;
  doc["format"] = kReportFormat;
  doc["version"] = kReportVersion;
  ordered_json pairs = ordered_json::array();
  for (std::size_t i = 0; i < report.psi_values.size(); ++i) {
    pairs.push_back({{"psi", report.psi_values[i]}, {"coverage", report.coverage[i]}});
  }
  doc["coverage"] = pairs;
  doc["entropy"] = report.entropy;
  doc["num_runs"] = report.num_runs;
  doc["pooled"] = report.pooled;
  doc["config_hash"] = report.config_hash;
  return doc.dump(2) + "\n";
}

CoverageReport parse_report(const std::string& text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kParseError, describe_parse_error(text, e.byte, e.what()));
  }
  const std::set<std::string> allowed{"format", "version", "coverage", "entropy", "num_runs", "pooled", "config_hash"};
  if (!doc.is_object()) throw Error(ErrorCode::kParseError, "report: top level must be an object");
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (!allowed.count(it.key())) throw Error(ErrorCode::kParseError, "report: unknown field '" + it.key() + "'");
  }
  CoverageReport report;
  try {
    if (doc.at("format") != kReportFormat || doc.at("version") != kReportVersion) {
      throw Error(ErrorCode::kParseError, "report: unsupported format or version");
    }
    for (const auto& pair : doc.at("coverage")) {
      report.psi_values.push_back(pair.at("psi").get<double>());
      report.coverage.push_back(pair.at("coverage").get<double>());
    }
    report.entropy = doc.at("entropy").get<double>();
    report.num_runs = doc.at("num_runs").get<std::size_t>();
    report.pooled = doc.at("pooled").get<bool>();
    report.config_hash = doc.at("config_hash").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("report: ") + e.what());
  }
  return report;
}

void save_report(const CoverageReport& report, const std::filesystem::path& path) {
  write_text_file(path, serialize_report(report));
}

CoverageReport load_report(const std::filesystem::path& path) { return parse_report(read_text_file(path)); }

TableRow make_row(const std::string& policy, const EnvConfig& config, const CoverageReport& report) {
  return {policy, config.line_of_sight, config.start_mode, config.num_agents, report.coverage, report.entropy};
}

std::string format_table(const Table& table) {
  std::ostringstream out;
  out << "policy\tline_of_sight\tstart\tpatrols";
  for (double psi : table.psi_values) out << "\tW_" << psi_label(psi);
  out << "\tentropy\n";
  for (const auto& row : table.rows) {
    if (row.coverage.size() != table.psi_values.size()) {
      throw Error(ErrorCode::kInvalidArgument, "table row does not match psi columns");
    }
    out << row.policy << '\t' << row.line_of_sight << '\t' << to_string(row.start_mode) << '\t' << row.patrols;
    for (double c : row.coverage) out << '\t' << format_fixed(c, 3);
    out << '\t' << format_fixed(row.entropy, 2) << '\n';
  }
  return out.str();
}

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find('\t', start);
    out.push_back(line.substr(start, pos == std::string::npos ? std::string::npos : pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_number(const std::string& s, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::kParseError, "table line " + std::to_string(line) + ": bad number '" + s + "'");
  }
}

}  // namespace

Table parse_table(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::kParseError, "table: missing header");
  const auto header = split_tabs(line);
  if (header.size() < 5 || header[0] != "policy" || header[1] != "line_of_sight" || header[2] != "start" ||
      header[3] != "patrols" || header.back() != "entropy") {
    throw Error(ErrorCode::kParseError, "table line 1: unexpected header");
  }
  Table table;
  for (std::size_t i = 4; i + 1 < header.size(); ++i) {
    if (header[i].rfind("W_", 0) != 0) throw Error(ErrorCode::kParseError, "table line 1: bad column " + header[i]);
    table.psi_values.push_back(parse_number(header[i].substr(2), 1));
  }
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto fields = split_tabs(line);
    if (fields.size() != header.size()) {
      throw Error(ErrorCode::kParseError, "table line " + std::to_string(lineno) + ": wrong field count");
    }
    TableRow row;
    row.policy = fields[0];
    row.line_of_sight = static_cast<int>(parse_number(fields[1], lineno));
    try {
      row.start_mode = parse_start_mode(fields[2]);
    } catch (const Error&) {
      throw Error(ErrorCode::kParseError, "table line " + std::to_string(lineno) + ": bad start mode");
    }
    row.patrols = static_cast<int>(parse_number(fields[3], lineno));
    for (std::size_t i = 4; i + 1 < fields.size(); ++i) row.coverage.push_back(parse_number(fields[i], lineno));
    row.entropy = parse_number(fields.back(), lineno);
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace patrol
