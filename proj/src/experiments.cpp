#include "sgnls/experiments.hpp"

#include "sgnls/calculus.hpp"
#include "sgnls/dynamics.hpp"
#include "sgnls/errors.hpp"
#include "sgnls/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace sgnls {

ToleranceProfile parse_tolerance_profile(std::string_view text) {
  if (text == "default") return ToleranceProfile::Default;
  if (text == "strict") return ToleranceProfile::Strict;
  throw ConfigError("unknown tolerance profile '" + std::string(text) + "'");
}

std::string to_string(ToleranceProfile p) { return p == ToleranceProfile::Strict ? "strict" : "default"; }

Thresholds thresholds_for(ToleranceProfile p) {
  Thresholds t;
  if (p == ToleranceProfile::Strict) {
    t.slope_relative /= 10.0;
    t.slope_absolute /= 10.0;
    t.identity_relative /= 10.0;
    t.richardson_window /= 10.0;
    t.fd_noise_floor /= 10.0;
    t.fd_relative /= 10.0;
    t.mass_drift /= 10.0;
    t.linear_limit /= 10.0;
    t.localized_ratio /= 10.0;
    t.eigen_identity /= 10.0;
    t.gram /= 10.0;
    t.parseval /= 10.0;
  }
  return t;
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.level < 1 || cfg.level > kDefaultMaxLevel)
    throw ConfigError("level must lie in [1, " + std::to_string(kDefaultMaxLevel) + "]");
  if (cfg.jmin < 2) throw ConfigError("jmin must be at least 2");
  if (cfg.jmax > cfg.level) throw ConfigError("jmax exceeds the level");
  for (int k : cfg.k)
    if (k < 1) throw ConfigError("k must be at least 1");
  for (double s : cfg.s)
    if (!(s >= 0.0 && s < 2.0)) throw ConfigError("regularity s must lie in [0, 2)");
  for (double q : cfg.q)
    if (!(q > 2.0)) throw ConfigError("q must exceed 2");
  for (double T : cfg.T)
    if (!(T > 0.0)) throw ConfigError("T must be positive");
  if (!(cfg.dt >= 0.0)) throw ConfigError("dt must be positive");
  if (cfg.mu != 1 && cfg.mu != -1) throw ConfigError("mu must be +1 or -1");
  if (cfg.format != "csv" && cfg.format != "json") throw ConfigError("format must be csv or json");
  if (cfg.threads < 1) throw ConfigError("threads must be at least 1");
  if (cfg.richardson_level < 1 || cfg.richardson_level > kDefaultMaxLevel)
    throw ConfigError("richardson level out of range");
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n;
  const double my = sy / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

namespace {

using cd = std::complex<double>;

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ";" : "") + format_double(v[i]);
  return out;
}

std::string join(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ";" : "") + std::to_string(v[i]);
  return out;
}

std::string sci(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

ExperimentReport start(std::string name, const ExperimentConfig& cfg, const EigenBasis* basis,
                       const std::vector<double>& T, double dt) {
  ExperimentReport r;
  r.experiment = std::move(name);
  r.artifact_version = std::string(kArtifactVersion);
  r.basis_fingerprint = basis ? basis_fingerprint(*basis) : "";
  r.parameters = {{"level", std::to_string(cfg.level)},
                  {"bc", to_string(cfg.bc)},
                  {"k", join(cfg.k)},
                  {"s", join(cfg.s)},
                  {"q", join(cfg.q)},
                  {"jmin", std::to_string(cfg.jmin)},
                  {"jmax", std::to_string(cfg.jmax)},
                  {"T", join(T)},
                  {"dt", format_double(dt)},
                  {"mu", std::to_string(cfg.mu)},
                  {"tolerance_profile", to_string(cfg.profile)}};
  return r;
}

RowParams base(const ExperimentConfig& cfg) {
  RowParams p;
  p.level = cfg.level;
  p.bc = to_string(cfg.bc);
  return p;
}

std::vector<int> j_range(const ExperimentConfig& cfg) {
  std::vector<int> js;
  for (int j = cfg.jmin; j <= cfg.jmax; ++j) js.push_back(j);
  return js;
}

int member(const EigenBasis& basis, int j) {
  const int i = basis.localized_index(j);
  if (i < 0) throw ConstructionError("basis lacks the localized function of level " + std::to_string(j));
  return i;
}

double spread(const std::vector<double>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *hi / *lo;
}

const char* kVacuous = "vacuous: empty j range";

}  // namespace

ExperimentReport run_basis(const ExperimentConfig& cfg, BasisStore& store) {
  validate(cfg);
  const auto th = thresholds_for(cfg.profile);
  const auto basis = store.get(cfg.level, cfg.bc);
  auto rep = start("basis", cfg, basis.get(), {}, 0.0);

  const std::int64_t expected =
      cfg.bc == BoundaryCondition::Dirichlet ? interior_count(cfg.level) : vertex_count(cfg.level);
  const auto& phi = basis->functions();
  const Eigen::MatrixXd gram = phi.transpose() * basis->weights().asDiagonal() * phi;
  const double gram_dev = (gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();

  std::mt19937_64 rng(20240601);
  std::normal_distribution<double> g;
  double parseval = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    auto c = SpectralCoeffs::zeros(basis);
    for (int i = 0; i < c.size(); ++i) c.coeffs[i] = cd(g(rng), g(rng));
    const double n = c.coeffs.norm();
    parseval = std::max(parseval, std::abs(n - lq_norm(from_coeffs(c), 2.0)) / n);
  }

  int members = 0;
  bool identical = true;
  for (int j = 2; j <= cfg.level; ++j) {
    const int i = basis->localized_index(j);
    if (i < 0) {
      identical = false;
      continue;
    }
    ++members;
    const auto psi = build_localized(j, 0, cfg.level, cfg.bc);
    identical = identical && phi.col(i) == psi.values.values.real();
  }

  rep.rows.push_back(ReportRow{base(cfg), {}}
                         .add("size", basis->size())
                         .add("expected_size", static_cast<double>(expected))
                         .add("gram_deviation", gram_dev)
                         .add("parseval_deviation", parseval)
                         .add("localized_members", members)
                         .add("lambda_min", basis->lambdas().minCoeff())
                         .add("lambda_max", basis->lambdas().maxCoeff()));
  rep.verdict("count", basis->size() == expected, std::to_string(basis->size()) + " of " + std::to_string(expected));
  rep.verdict("gram", gram_dev <= th.gram, "max deviation " + sci(gram_dev));
  rep.verdict("parseval", parseval <= th.parseval, "max relative deviation " + sci(parseval));
  rep.verdict("localized-members", identical && members == cfg.level - 1,
              std::to_string(members) + " members, bit-identical=" + (identical ? "yes" : "no"));
  return rep;
}

ExperimentReport run_spectrum(const ExperimentConfig& cfg, BasisStore&) {
  validate(cfg);
  const auto th = thresholds_for(cfg.profile);
  auto rep = start("spectrum", cfg, nullptr, {}, 0.0);
  const auto spec = graph_spectrum(cfg.level, cfg.bc, GraphMeasure::Quadrature);

  // distinct graph values, renormalized independently of the localized construction
  std::vector<double> distinct;
  for (int i = 0; i < spec.values.size();) {
    int e = i + 1;
    while (e < spec.values.size() &&
           spec.values[e] - spec.values[i] <= kClusterTolerance * std::max(1.0, spec.values[i]))
      ++e;
    double value = spec.values.segment(i, e - i).mean();
    if (std::abs(value) <= 1e-12) value = 0.0;
    const double lambda = renormalize_eigenvalue(value, cfg.level);
    distinct.push_back(lambda);
    auto p = base(cfg);
    rep.rows.push_back(ReportRow{p, {}}
                           .add("index", static_cast<double>(distinct.size()))
                           .add("graph_eigenvalue", value)
                           .add("lambda", lambda)
                           .add("multiplicity", e - i)
                           .add("birth_level", infer_birth_level(value, cfg.level, cfg.bc)));
    i = e;
  }
  const std::int64_t expected =
      cfg.bc == BoundaryCondition::Dirichlet ? interior_count(cfg.level) : vertex_count(cfg.level);
  rep.verdict("count", spec.values.size() == expected,
              std::to_string(spec.values.size()) + " of " + std::to_string(expected));

  if (cfg.level >= 2) {
    const double target = localized_eigenvalue(2);
    double got = std::nan("");
    std::string which;
    if (cfg.bc == BoundaryCondition::Dirichlet) {
      which = "6th distinct Dirichlet value";
      if (distinct.size() >= 6) got = distinct[5];
    } else {
      which = "smallest nonzero Neumann value";
      for (double v : distinct)
        if (v > 0.0) {
          got = v;
          break;
        }
    }
    const double rel = std::abs(got - target) / target;
    rep.verdict("localized-identity", rel <= th.eigen_identity,
                which + " " + format_double(got) + " vs Lambda(psi2) " + format_double(target));
  }
  return rep;
}

ExperimentReport run_localized(const ExperimentConfig& cfg, BasisStore&) {
  validate(cfg);
  const auto th = thresholds_for(cfg.profile);
  auto rep = start("localized", cfg, nullptr, {}, 0.0);
  double worst_residual = 0.0, worst_ratio = 0.0;
  bool support_ok = true;
  for (int j : j_range(cfg)) {
    const auto seed = build_localized_seed(j);
    const auto psi = build_localized(j, 0, cfg.level, cfg.bc);
    const double ratio = localized_eigenvalue(j) / localized_eigenvalue(j - 1);
    const double supp = support_measure(psi.values);
    const double lo = 2.0 * std::pow(3.0, -j);
    const double hi = 2.0 * std::pow(3.0, -j + 1);
    auto p = base(cfg);
    p.j = j;
    rep.rows.push_back(ReportRow{p, {}}
                           .add("lambda", psi.lambda)
                           .add("ratio_to_previous", ratio)
                           .add("seed_residual", seed.residual)
                           .add("support_measure", supp)
                           .add("support_lower", lo)
                           .add("support_upper", hi)
                           .add("l2_norm", lq_norm(psi.values, 2.0))
                           .add("continuum_residual", eigen_residual(psi, cfg.level)));
    worst_residual = std::max(worst_residual, seed.residual);
    worst_ratio = std::max(worst_ratio, std::abs(ratio - 5.0) / 5.0);
    support_ok = support_ok && supp >= lo && supp <= hi;
  }
  const bool empty = cfg.jmin > cfg.jmax;
  rep.verdict("seed-residual", worst_residual <= th.seed_residual, empty ? kVacuous : "max " + sci(worst_residual));
  rep.verdict("ratio-five", worst_ratio <= th.localized_ratio, empty ? kVacuous : "max deviation " + sci(worst_ratio));
  rep.verdict("support-bounds", support_ok, empty ? kVacuous : "");
  return rep;
}

ExperimentReport run_sobolev_saturation(const ExperimentConfig& cfg, BasisStore& store) {
  validate(cfg);
  const auto th = thresholds_for(cfg.profile);
  const auto basis = store.get(cfg.level, cfg.bc);
  auto rep = start("sobolev", cfg, basis.get(), {}, 0.0);
  const auto js = j_range(cfg);
  for (double q : cfg.q) {
    const double sq = sigma_q(q);
    std::vector<double> ratios;
    for (int j : js) {
      const int i = member(*basis, j);
      const auto unit = SpectralCoeffs::unit(basis, i);
      const double lq = lq_norm(from_coeffs(unit), q);
      const double lambda = basis->lambda(i);
      const double r = lq / std::pow(lambda, sq / 2.0);
      ratios.push_back(r);
      auto p = base(cfg);
      p.q = q;
      p.j = j;
      p.s = sq;
      rep.rows.push_back(ReportRow{p, {}}
                             .add("lambda", lambda)
                             .add("lq_norm", lq)
                             .add("hs_norm", hs_norm(unit, sq))
                             .add("ratio", r)
                             .add("lq_over_hs", lq / hs_norm(unit, sq)));
    }
    const std::string name = "saturation q=" + sci(q);
    if (ratios.empty()) {
      rep.verdict(name, true, kVacuous);
    } else {
      const double sp = spread(ratios);
      rep.verdict(name, sp <= th.saturation_spread, "max/min " + sci(sp));
    }
  }
  return rep;
}

ExperimentReport run_illposedness(const ExperimentConfig& cfg, BasisStore& store) {
  validate(cfg);
  const auto th = thresholds_for(cfg.profile);
  const auto basis = store.get(cfg.level, cfg.bc);
  const std::vector<double> svals = cfg.s.empty() ? std::vector<double>{0.3, 0.5} : cfg.s;
  const std::vector<double> Ts = cfg.T.empty() ? std::vector<double>{1.0} : cfg.T;
  auto rep = start("illposed", cfg, basis.get(), Ts, 0.0);
  rep.parameters[3].second = join(svals);
  const auto js = j_range(cfg);
  const double sigma_inf = spectral_dimension() / 2.0;

  for (double T : Ts) {
    for (int k : cfg.k) {
      std::vector<DuhamelResult> res(js.size(), DuhamelResult{SpectralCoeffs::zeros(basis), -1, {}, {}, {}});
      parallel_for(static_cast<int>(js.size()), cfg.threads, [&](int n) {
        res[n] = duhamel_of_eigenfunction(basis->pair(member(*basis, js[n])), k, T, basis, svals);
      });
      for (std::size_t si = 0; si < svals.size(); ++si) {
        const double s = svals[si];
        std::vector<double> logl, logd, ds;
        bool lower = true;
        for (std::size_t n = 0; n < js.size(); ++n) {
          const int i = res[n].source_index;
          const double lambda = basis->lambda(i);
          const double psi_hs = hs_norm(SpectralCoeffs::unit(basis, i), s);
          const double d = res[n].full_norm[si] / std::pow(psi_hs, 2 * k + 1);
          logl.push_back(std::log(lambda));
          logd.push_back(std::log(d));
          ds.push_back(d);
          lower = lower && res[n].full_norm[si] >= res[n].resonant_term[si];
          auto p = base(cfg);
          p.k = k;
          p.s = s;
          p.j = js[n];
          p.T = T;
          rep.rows.push_back(ReportRow{p, {}}
                                 .add("lambda", lambda)
                                 .add("duhamel_norm", res[n].full_norm[si])
                                 .add("resonant_term", res[n].resonant_term[si])
                                 .add("ratio", d));
        }
        const std::string tag = "k=" + std::to_string(k) + " s=" + sci(s) + " T=" + sci(T);
        const double target = k * (sigma_inf - s);
        if (js.size() < 2) {
          rep.verdict("slope " + tag, true, kVacuous);
        } else {
          const double slope = fit_slope(logl, logd);
          const double err = std::abs(slope - target);
          const bool ok = target == 0.0 ? err <= th.slope_absolute : err <= th.slope_relative * std::abs(target);
          rep.verdict("slope " + tag, ok, "fitted " + sci(slope) + " target " + sci(target));
        }
        if (s < sigma_inf && !ds.empty()) {
          const double top = *std::max_element(ds.begin(), ds.end());
          for (double c : th.ladder)
            rep.verdict("ladder " + sci(c) + " " + tag, top > c, "max ratio " + sci(top));
        }
        rep.verdict("resonant-lower-bound " + tag, lower, ds.empty() ? kVacuous : "");
      }
    }
  }
  return rep;
}

ExperimentReport run_strichartz(const ExperimentConfig& cfg, BasisStore& store) {
  validate(cfg);
  const auto th = thresholds_for(cfg.profile);
  const auto basis = store.get(cfg.level, cfg.bc);
  const std::vector<double> Ts = cfg.T.empty() ? std::vector<double>{0.5, 1.0} : cfg.T;
  auto rep = start("strichartz", cfg, basis.get(), Ts, 0.0);
  const auto js = j_range(cfg);
  const double critical = spectral_dimension() / 4.0;
  const double sub = critical - 0.1;
  rep.parameters[3].second = join(std::vector<double>{sub, critical});

  for (double T : Ts) {
    std::vector<double> l4(js.size());
    parallel_for(static_cast<int>(js.size()), cfg.threads, [&](int n) {
      l4[n] = strichartz_l4(SpectralCoeffs::unit(basis, member(*basis, js[n])), T);
    });
    double worst = 0.0;
    std::vector<double> sub_ratio, crit_ratio;
    std::vector<int> sub_j;
    for (std::size_t n = 0; n < js.size(); ++n) {
      const int i = member(*basis, js[n]);
      const auto unit = SpectralCoeffs::unit(basis, i);
      const double ref = T * std::pow(lq_norm(from_coeffs(unit), 4.0), 4.0);
      const double got = std::pow(l4[n], 4.0);
      const double rel = std::abs(got - ref) / ref;
      worst = std::max(worst, rel);
      const double rs = l4[n] / hs_norm(unit, sub);
      const double rc = l4[n] / hs_norm(unit, critical);
      // the top level carries only the seed, too coarse for the growth comparison
      if (js[n] <= cfg.level - 1) {
        sub_ratio.push_back(rs);
        sub_j.push_back(js[n]);
      }
      crit_ratio.push_back(rc);
      auto p = base(cfg);
      p.j = js[n];
      p.T = T;
      rep.rows.push_back(ReportRow{p, {}}
                             .add("strichartz_fourth", got)
                             .add("time_identity", ref)
                             .add("identity_error", rel)
                             .add("ratio_subcritical", rs)
                             .add("ratio_critical", rc));
    }
    const std::string tag = "T=" + sci(T);
    rep.verdict("identity " + tag, worst <= th.identity_relative, js.empty() ? kVacuous : "max " + sci(worst));
    bool increasing = true;
    for (std::size_t n = 1; n < sub_ratio.size(); ++n) increasing = increasing && sub_ratio[n] > sub_ratio[n - 1];
    std::string detail = sub_j.empty() ? std::string(kVacuous)
                                       : "j=" + std::to_string(sub_j.front()) + ".." + std::to_string(sub_j.back());
    rep.verdict("subcritical-growth " + tag, increasing, detail);
    if (crit_ratio.empty()) {
      rep.verdict("critical-bounded " + tag, true, kVacuous);
    } else {
      const double sp = spread(crit_ratio);
      rep.verdict("critical-bounded " + tag, sp <= th.critical_spread, "max/min " + sci(sp));
    }
  }
  return rep;
}

ExperimentReport run_derivative_check(const ExperimentConfig& cfg, BasisStore& store) {
  validate(cfg);
  const auto th = thresholds_for(cfg.profile);
  const auto basis = store.get(cfg.level, cfg.bc);
  const std::vector<double> Ts = cfg.T.empty() ? std::vector<double>{0.05} : cfg.T;
  const double dt = cfg.dt > 0.0 ? cfg.dt : 2.5e-4;
  auto rep = start("derivcheck", cfg, basis.get(), Ts, dt);
  const int j = cfg.jmin <= cfg.jmax ? cfg.jmin : 2;
  const auto u0 = SpectralCoeffs::unit(basis, member(*basis, j));
  const double scale = l2_norm(u0);

  for (double t : Ts) {
    const std::string tag = "T=" + sci(t);
    auto p = base(cfg);
    p.j = j;
    p.T = t;
    p.dt = dt;
    for (int k : cfg.k) {
      p.k = k;
      NlsConfig nc;
      nc.k = k;
      nc.mu = cfg.mu;
      nc.T = t;
      nc.dt = dt;
      if (k != 1) {
        // order 2k+1 lies beyond the stencil table: check the resonant coefficient instead
        const auto d = map_derivative(2 * k + 1, u0, t, k, cfg.mu, DerivativeRoute::ClosedForm);
        double fact = 1.0;
        for (int n = 2; n <= 2 * k + 1; ++n) fact *= n;
        const double want = fact * t * std::pow(lq_norm(from_coeffs(u0), 2.0 * k + 2.0), 2.0 * k + 2.0);
        const double got = std::abs(d.coeffs[member(*basis, j)]);
        const double rel = std::abs(got - want) / want;
        rep.rows.push_back(ReportRow{p, {}}.add("m", 2 * k + 1).add("resonant_coefficient", got).add("error", rel));
        rep.verdict("resonant k=" + std::to_string(k) + " " + tag, rel <= 1e-10, "relative " + sci(rel));
        continue;
      }
      try {
        const auto lin = propagate(u0, t);
        const double h1 = 0.04 / scale;
        const double e1 = l2_distance(gamma_derivative_fd(1, u0, t, nc, h1, cfg.threads), lin) / scale;
        const double e2 = l2_distance(gamma_derivative_fd(1, u0, t, nc, h1 / 2.0, cfg.threads), lin) / scale;
        const double slope = std::log2(e1 / e2);
        rep.rows.push_back(ReportRow{p, {}}.add("m", 1).add("h", h1).add("error", e1));
        rep.rows.push_back(ReportRow{p, {}}.add("m", 1).add("h", h1 / 2.0).add("error", e2).add("richardson_slope", slope));
        rep.verdict("m=1 richardson " + tag, std::abs(slope - th.richardson_slope) <= th.richardson_window,
                    "slope " + sci(slope));

        const double h2 = default_fd_step(2, u0);
        const double n2 = l2_norm(gamma_derivative_fd(2, u0, t, nc, h2, cfg.threads)) / scale;
        rep.rows.push_back(ReportRow{p, {}}.add("m", 2).add("h", h2).add("error", n2));
        rep.verdict("m=2 vanishes " + tag, n2 <= th.fd_noise_floor, "norm " + sci(n2));

        const double h3 = 0.01 / scale;
        const auto exact = map_derivative(3, u0, t, 1, cfg.mu);
        const double e3 = l2_distance(gamma_derivative_fd(3, u0, t, nc, h3, cfg.threads), exact) / l2_norm(exact);
        rep.rows.push_back(ReportRow{p, {}}.add("m", 3).add("h", h3).add("error", e3));
        rep.verdict("m=3 closed form " + tag, e3 <= th.fd_relative, "relative " + sci(e3));
      } catch (const StepSizeError& e) {
        rep.rows.push_back(ReportRow{p, {}}.add("guard_trip", 1.0));
        rep.verdict("solver " + tag, false, e.what());
      } catch (const BlowUpError& e) {
        rep.rows.push_back(ReportRow{p, {}}.add("guard_trip", 1.0));
        rep.verdict("solver " + tag, false, e.what());
      }
    }
  }
  return rep;
}

ExperimentReport run_nls(const ExperimentConfig& cfg, BasisStore& store) {
  validate(cfg);
  const auto th = thresholds_for(cfg.profile);
  const auto basis = store.get(cfg.level, cfg.bc);
  const std::vector<double> Ts = cfg.T.empty() ? std::vector<double>{1.0} : cfg.T;
  const double dt = cfg.dt > 0.0 ? cfg.dt : 1e-3;
  auto rep = start("nls", cfg, basis.get(), Ts, dt);
  rep.parameters.emplace_back("richardson_level", std::to_string(cfg.richardson_level));

  auto low_modes = [](const BasisPtr& b) {
    auto c = SpectralCoeffs::zeros(b);
    c.coeffs[0] = 1.0;
    c.coeffs[1] = cd(0.0, 0.5);
    return c;
  };
  const auto u0 = low_modes(basis);
  const auto coarse = store.get(std::min(cfg.richardson_level, cfg.level), cfg.bc);
  const auto v0 = low_modes(coarse);

  for (double T : Ts) {
    for (int k : cfg.k) {
      for (int mu : {1, -1}) {
        NlsConfig nc;
        nc.k = k;
        nc.mu = mu;
        nc.T = T;
        nc.dt = dt;
        const std::string tag =
            "k=" + std::to_string(k) + " mu=" + std::to_string(mu) + " T=" + sci(T);
        auto p = base(cfg);
        p.k = k;
        p.T = T;
        p.dt = dt;
        try {
          const long steps = std::max(1L, static_cast<long>(std::ceil(T / dt - 1e-9)));
          const auto traj = nls_solve(u0, nc, {.stride = static_cast<int>(std::max(1L, steps / 10))});
          double drift = 0.0;
          for (const auto& s : traj.states) drift = std::max(drift, std::abs(l2_norm(s) - l2_norm(u0)));
          const double linear = l2_distance(nls_solve(u0, nc, {.nonlinear_scale = 0.0}).last(), propagate(u0, T));
          rep.rows.push_back(ReportRow{p, {}}.add("mu", mu).add("mass_drift", drift).add("linear_limit", linear));
          rep.verdict("mass " + tag, drift <= th.mass_drift, "max drift " + sci(drift));
          rep.verdict("linear-limit " + tag, linear <= th.linear_limit, "deviation " + sci(linear));

          std::vector<SpectralCoeffs> r;
          for (double h : {dt, dt / 2.0, dt / 4.0}) {
            nc.dt = h;
            r.push_back(nls_solve(v0, nc).last());
          }
          const double e1 = l2_distance(r[0], r[1]);
          const double e2 = l2_distance(r[1], r[2]);
          const double slope = std::log2(e1 / e2);
          auto pr = p;
          pr.level = coarse->level();
          rep.rows.push_back(ReportRow{pr, {}}.add("mu", mu).add("richardson_error", e1).add("richardson_slope", slope));
          rep.verdict("richardson " + tag, std::abs(slope - th.richardson_slope) <= th.richardson_window,
                      "slope " + sci(slope) + " at level " + std::to_string(coarse->level()));
        } catch (const StepSizeError& e) {
          rep.rows.push_back(ReportRow{p, {}}.add("mu", mu).add("guard_trip", 1.0));
          rep.verdict("solver " + tag, false, e.what());
        } catch (const BlowUpError& e) {
          rep.rows.push_back(ReportRow{p, {}}.add("mu", mu).add("guard_trip", 1.0));
          rep.verdict("solver " + tag, false, e.what());
        }
      }
    }
  }
  return rep;
}

ExperimentReport run_verify(const ExperimentConfig& cfg, BasisStore& store) {
  validate(cfg);
  const auto basis = store.get(cfg.level, cfg.bc);
  auto rep = start("verify", cfg, basis.get(), cfg.T, cfg.dt);
  using Runner = ExperimentReport (*)(const ExperimentConfig&, BasisStore&);
  const std::pair<const char*, Runner> parts[] = {
      {"basis", run_basis},           {"spectrum", run_spectrum},
      {"localized", run_localized},   {"sobolev", run_sobolev_saturation},
      {"illposed", run_illposedness}, {"strichartz", run_strichartz},
      {"derivcheck", run_derivative_check}, {"nls", run_nls}};
  int index = 0;
  for (const auto& [name, run] : parts) {
    auto sub = run(cfg, store);
    int passed = 0;
    for (auto& v : sub.verdicts) {
      passed += v.pass ? 1 : 0;
      rep.verdicts.push_back({std::string(name) + "/" + v.name, v.pass, std::move(v.detail)});
    }
    rep.rows.push_back(ReportRow{base(cfg), {}}
                           .add("experiment_index", index++)
                           .add("verdicts", static_cast<double>(sub.verdicts.size()))
                           .add("passed", passed));
  }
  return rep;
}

}  // namespace sgnls
