#include "sgnls/errors.hpp"
#include "sgnls/experiments.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>

using namespace sgnls;

int main(int argc, char** argv) {
  CLI::App app{"Numerical experiments for the nonlinear Schrodinger equation on the Sierpinski gasket"};
  app.require_subcommand(1);
  app.fallthrough();

  ExperimentConfig cfg;
  std::string bc = "dirichlet";
  std::string profile = "default";
  std::string out;
  std::string cache;
  std::vector<double> svals, qvals, Ts;
  std::vector<int> ks;

  app.add_option("--level", cfg.level, "sampling level M")->capture_default_str();
  app.add_option("--bc", bc, "dirichlet or neumann")->capture_default_str();
  app.add_option("--k", ks, "nonlinearity order (repeatable)");
  app.add_option("--s", svals, "Sobolev regularity (repeatable)");
  app.add_option("--q", qvals, "Lebesgue exponent (repeatable)");
  app.add_option("--jmin", cfg.jmin, "first localized level")->capture_default_str();
  app.add_option("--jmax", cfg.jmax, "last localized level")->capture_default_str();
  app.add_option("--T", Ts, "time horizon (repeatable)");
  app.add_option("--dt", cfg.dt, "time step");
  app.add_option("--out", out, "report path, stdout when absent");
  app.add_option("--format", cfg.format, "csv or json")->capture_default_str();
  app.add_option("--cache", cache, "eigenbasis cache directory");
  app.add_option("--threads", cfg.threads, "worker threads")->capture_default_str();
  app.add_option("--tolerance-profile", profile, "default or strict")->capture_default_str();

  using Runner = ExperimentReport (*)(const ExperimentConfig&, BasisStore&);
  const std::map<std::string, std::pair<Runner, std::string>> commands = {
      {"basis", {run_basis, "build or load the eigenbasis and check its quality"}},
      {"spectrum", {run_spectrum, "renormalized spectrum from the graph eigensolve"}},
      {"localized", {run_localized, "localized eigenfunction family"}},
      {"sobolev", {run_sobolev_saturation, "Sobolev embedding saturation on the localized family"}},
      {"illposed", {run_illposedness, "Duhamel growth witnessing ill-posedness"}},
      {"strichartz", {run_strichartz, "L4 space-time norms of the free flow"}},
      {"derivcheck", {run_derivative_check, "flow-map derivatives against finite differences"}},
      {"nls", {run_nls, "split-step solver hygiene"}},
      {"verify", {run_verify, "every experiment with merged verdicts"}},
  };
  for (const auto& [name, entry] : commands) app.add_subcommand(name, entry.second);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    cfg.bc = parse_boundary_condition(bc);
    cfg.profile = parse_tolerance_profile(profile);
    if (!ks.empty()) cfg.k = ks;
    if (!qvals.empty()) cfg.q = qvals;
    cfg.s = svals;
    cfg.T = Ts;
    if (const char* env = std::getenv("SGNLS_CACHE"); env && *env) cache = env;
    cfg.cache_dir = cache;
    validate(cfg);

    BasisStore store(cfg.cache_dir);
    const auto* sub = app.get_subcommands().front();
    const auto report = commands.at(sub->get_name()).first(cfg, store);
    const std::string text = report.render(cfg.format);
    if (out.empty()) {
      std::cout << text;
    } else {
      std::ofstream f(out, std::ios::binary);
      if (!f) throw ConfigError("cannot write " + out);
      f << text;
    }
    for (const auto& v : report.verdicts)
      std::cerr << (v.pass ? "PASS " : "FAIL ") << v.name << (v.detail.empty() ? "" : "  (" + v.detail + ")") << '\n';
    return report.passed() ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "sgnls: " << e.what() << '\n';
    return 2;
  }
}
