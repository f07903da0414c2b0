#pragma once

#include "sgnls/cache.hpp"
#include "sgnls/report.hpp"
#include "sgnls/spectral.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace sgnls {

enum class ToleranceProfile { Default, Strict };

ToleranceProfile parse_tolerance_profile(std::string_view text);
std::string to_string(ToleranceProfile p);

// Pass/fail thresholds of the experiment verdicts.
struct Thresholds {
  double saturation_spread = 4.0;     // max/min of the saturation ratios
  double slope_relative = 0.05;       // ill-posedness slope vs k(d_S/2 - s)
  double slope_absolute = 0.02;       // used when the target slope is 0
  std::vector<double> ladder{10.0, 100.0, 1000.0};
  double identity_relative = 1e-6;    // Strichartz time-quadrature identity
  double critical_spread = 2.0;       // Strichartz ratio at s = d_S/4
  double richardson_slope = 2.0;
  double richardson_window = 0.3;
  double fd_noise_floor = 1e-6;       // relative to ||u0||
  double fd_relative = 1e-2;          // order-3 derivative vs closed form
  double mass_drift = 1e-8;
  double linear_limit = 1e-10;
  double seed_residual = 1e-12;
  double localized_ratio = 1e-9;
  double eigen_identity = 1e-8;
  double gram = 1e-8;
  double parseval = 1e-6;
};

// Strict divides every relative tolerance by ten; bounds and ladders stay.
Thresholds thresholds_for(ToleranceProfile p);

struct ExperimentConfig {
  int level = 6;
  BoundaryCondition bc = BoundaryCondition::Dirichlet;
  std::vector<int> k{1};
  std::vector<double> s;  // empty: experiment default
  std::vector<double> q{4.0, 6.0, 8.0};
  int jmin = 2;
  int jmax = 6;
  std::vector<double> T;  // empty: experiment default
  double dt = 0.0;        // 0: experiment default
  int mu = 1;
  std::string format = "csv";
  std::filesystem::path cache_dir;
  int threads = 1;
  ToleranceProfile profile = ToleranceProfile::Default;
  // Splitting order is measured where dt * Lambda_max is of order one.
  int richardson_level = 3;
};

// Throws ConfigError.
void validate(const ExperimentConfig& cfg);

ExperimentReport run_basis(const ExperimentConfig& cfg, BasisStore& store);
ExperimentReport run_spectrum(const ExperimentConfig& cfg, BasisStore& store);
ExperimentReport run_localized(const ExperimentConfig& cfg, BasisStore& store);
ExperimentReport run_sobolev_saturation(const ExperimentConfig& cfg, BasisStore& store);
ExperimentReport run_illposedness(const ExperimentConfig& cfg, BasisStore& store);
ExperimentReport run_strichartz(const ExperimentConfig& cfg, BasisStore& store);
ExperimentReport run_derivative_check(const ExperimentConfig& cfg, BasisStore& store);
ExperimentReport run_nls(const ExperimentConfig& cfg, BasisStore& store);
// All of the above merged; verdict names carry the experiment as prefix.
ExperimentReport run_verify(const ExperimentConfig& cfg, BasisStore& store);

// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace sgnls
