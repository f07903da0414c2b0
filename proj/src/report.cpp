#include "sgnls/report.hpp"

#include "sgnls/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace sgnls {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

bool ExperimentReport::passed() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
}

void ExperimentReport::verdict(std::string name, bool pass, std::string detail) {
  verdicts.push_back({std::move(name), pass, std::move(detail)});
}

namespace {

std::vector<std::string> metric_columns(const std::vector<ReportRow>& rows) {
  std::vector<std::string> cols;
  for (const auto& r : rows)
    for (const auto& [name, value] : r.metrics)
      if (std::find(cols.begin(), cols.end(), name) == cols.end()) cols.push_back(name);
  return cols;
}

template <class T>
std::string cell(const std::optional<T>& v) {
  if (!v) return {};
  if constexpr (std::is_same_v<T, double>) return format_double(*v);
  else if constexpr (std::is_same_v<T, std::string>) return *v;
  else return std::to_string(*v);
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

template <class T>
nlohmann::ordered_json jvalue(const std::optional<T>& v) {
  if (!v) return nullptr;
  if constexpr (std::is_same_v<T, double>) {
    if (!std::isfinite(*v)) return format_double(*v);
  }
  return *v;
}

nlohmann::ordered_json jnumber(double v) {
  if (!std::isfinite(v)) return format_double(v);
  return v;
}

}  // namespace

std::string ExperimentReport::to_csv() const {
  const auto cols = metric_columns(rows);
  std::string out = "experiment,M,bc,k,s,q,j,T,dt";
  for (const auto& c : cols) out += "," + csv_escape(c);
  out += '\n';
  for (const auto& r : rows) {
    const auto& p = r.params;
    out += csv_escape(experiment);
    for (const auto& c : {cell(p.level), cell(p.bc), cell(p.k), cell(p.s), cell(p.q), cell(p.j), cell(p.T), cell(p.dt)})
      out += "," + c;
    for (const auto& c : cols) {
      out += ',';
      auto it = std::find_if(r.metrics.begin(), r.metrics.end(), [&](const auto& m) { return m.first == c; });
      if (it != r.metrics.end()) out += format_double(it->second);
    }
    out += '\n';
  }
  out += "# artifact_version=" + artifact_version + " basis_fingerprint=" + basis_fingerprint + '\n';
  for (const auto& [key, value] : parameters) out += "# param " + key + "=" + value + '\n';
  for (const auto& v : verdicts)
    out += std::string("# verdict ") + (v.pass ? "PASS " : "FAIL ") + v.name + (v.detail.empty() ? "" : ": " + v.detail) + '\n';
  return out;
}

std::string ExperimentReport::to_json() const {
  nlohmann::ordered_json j;
  j["experiment"] = experiment;
  j["artifact_version"] = artifact_version;
  j["basis_fingerprint"] = basis_fingerprint;
  auto params = nlohmann::ordered_json::object();
  for (const auto& [key, value] : parameters) params[key] = value;
  j["parameters"] = params;
  auto arr = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    nlohmann::ordered_json row;
    const auto& p = r.params;
    row["M"] = jvalue(p.level);
    row["bc"] = jvalue(p.bc);
    row["k"] = jvalue(p.k);
    row["s"] = jvalue(p.s);
    row["q"] = jvalue(p.q);
    row["j"] = jvalue(p.j);
    row["T"] = jvalue(p.T);
    row["dt"] = jvalue(p.dt);
    for (const auto& [name, value] : r.metrics) row[name] = jnumber(value);
    arr.push_back(std::move(row));
  }
  j["rows"] = arr;
  auto ver = nlohmann::ordered_json::array();
  for (const auto& v : verdicts) ver.push_back({{"name", v.name}, {"pass", v.pass}, {"detail", v.detail}});
  j["verdicts"] = ver;
  j["passed"] = passed();
  return j.dump(2) + "\n";
}

std::string ExperimentReport::render(const std::string& format) const {
  if (format == "csv") return to_csv();
  if (format == "json") return to_json();
  throw ConfigError("unknown report format '" + format + "'");
}

}  // namespace sgnls
