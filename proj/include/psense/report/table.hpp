#pragma once

#include "psense/report/analysis.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace psense::report {

// One row per program; multi-loop programs join per-loop values with "; ".
struct TableRow {
  std::string example;
  std::string kind;  // certificate kind, or "failed (<prerequisite>)"
  double time = 0;   // seconds
  std::string eta;
  std::string K;
  std::string d;
  std::string M;
  std::string c;
  std::string A;
  std::string B;
};

TableRow table_row(const AnalysisReport& report, int digits = 4);

std::string render_markdown(const std::vector<TableRow>& rows);
nlohmann::json to_json(const std::vector<TableRow>& rows);

struct DirectoryReport {
  std::vector<AnalysisReport> reports;  // one per .pprog file, sorted by name
  std::vector<std::string> errors;      // files that failed to load
};

// Certifies every .pprog file directly inside `directory`.
DirectoryReport report_directory(const std::filesystem::path& directory, const AnalysisOptions& options);

}  // namespace psense::report
