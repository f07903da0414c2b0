#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace sgnls {

// Parameters echoed on every row; unset ones print as empty cells.
struct RowParams {
  std::optional<int> level;
  std::optional<std::string> bc;
  std::optional<int> k;
  std::optional<double> s;
  std::optional<double> q;
  std::optional<int> j;
  std::optional<double> T;
  std::optional<double> dt;
};

struct ReportRow {
  RowParams params;
  std::vector<std::pair<std::string, double>> metrics;

  ReportRow& add(std::string name, double value) {
    metrics.emplace_back(std::move(name), value);
    return *this;
  }
};

struct Verdict {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct ExperimentReport {
  std::string experiment;
  std::vector<std::pair<std::string, std::string>> parameters;
  std::vector<ReportRow> rows;
  std::vector<Verdict> verdicts;
  std::string artifact_version;
  std::string basis_fingerprint;

  bool passed() const;
  void verdict(std::string name, bool pass, std::string detail = {});

  // Columns: experiment,M,bc,k,s,q,j,T,dt then metrics in first-seen order.
  // Verdicts follow the table as '#' lines.
  std::string to_csv() const;
  std::string to_json() const;
  std::string render(const std::string& format) const;
};

// %.17g, or "nan"/"inf"/"-inf".
std::string format_double(double v);

}  // namespace sgnls
