#include "psense/report/table.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace psense::report {

namespace {

template <class Get>
std::string join_loops(const AnalysisReport& report, Get&& get) {
  std::string out;
  for (std::size_t i = 0; i < report.loops.size(); ++i) {
    if (!report.loops[i].witness) continue;
    if (!out.empty()) out += "; ";
    out += get(*report.loops[i].witness);
  }
  return out.empty() ? "-" : out;
}

std::string optional_decimal(const std::optional<Rational>& value, int digits) {
  return value ? to_decimal(*value, digits) : "-";
}

std::string escape_cell(const std::string& text) {
  std::string out;
  for (char ch : text) {
    if (ch == '|') out += "\\|";
    else out += ch;
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

TableRow table_row(const AnalysisReport& report, int digits) {
  TableRow row;
  row.example = report.program_id;
  row.time = report.timings.total();
  if (report.certificate) {
    row.kind = cert::to_string(report.certificate->kind);
    row.A = to_decimal(report.certificate->A, digits);
    row.B = to_decimal(report.certificate->B, digits);
  } else {
    row.kind = "failed (" + report.failed_prerequisite + ")";
    row.A = row.B = "-";
  }
  row.eta = join_loops(report, [&](const rsm::RsmWitness& w) { return w.eta.describe(w.variables, digits); });
  row.K = join_loops(report, [&](const rsm::RsmWitness& w) { return to_decimal(w.K, digits); });
  row.d = join_loops(report, [&](const rsm::RsmWitness& w) { return optional_decimal(w.d, digits); });
  row.M = join_loops(report, [&](const rsm::RsmWitness& w) { return optional_decimal(w.M, digits); });
  row.c = join_loops(report, [&](const rsm::RsmWitness& w) { return optional_decimal(w.c, digits); });
  return row;
}

std::string render_markdown(const std::vector<TableRow>& rows) {
  std::ostringstream out;
  out << "| example | kind | time/s | eta | K | d | M | c | A | B |\n";
  out << "|---|---|---|---|---|---|---|---|---|---|\n";
  for (const auto& r : rows) {
    char time[32];
    std::snprintf(time, sizeof time, "%.3f", r.time);
    out << "| " << escape_cell(r.example) << " | " << r.kind << " | " << time << " | " << escape_cell(r.eta)
        << " | " << r.K << " | " << r.d << " | " << r.M << " | " << r.c << " | " << r.A << " | " << r.B << " |\n";
  }
  return out.str();
}

nlohmann::json to_json(const std::vector<TableRow>& rows) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : rows)
    out.push_back({{"example", r.example}, {"kind", r.kind}, {"time", r.time}, {"eta", r.eta}, {"K", r.K},
                   {"d", r.d}, {"M", r.M}, {"c", r.c}, {"A", r.A}, {"B", r.B}});
  return out;
}

DirectoryReport report_directory(const std::filesystem::path& directory, const AnalysisOptions& options) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(directory))
    if (entry.is_regular_file() && entry.path().extension() == ".pprog") files.push_back(entry.path());
  std::sort(files.begin(), files.end());

  DirectoryReport out;
  for (const auto& file : files) {
    try {
      out.reports.push_back(certify_source(read_file(file), file.string(), file.stem().string(), options));
    } catch (const InvalidProgram& e) {
      std::string message = e.what();
      for (const auto& d : e.diagnostics()) message += "\n  " + d;
      out.errors.push_back(message);
    } catch (const std::runtime_error& e) {
      out.errors.push_back(file.string() + ": " + e.what());
    }
  }
  return out;
}

}  // namespace psense::report
