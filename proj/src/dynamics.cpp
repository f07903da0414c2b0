#include "sgnls/dynamics.hpp"

#include "sgnls/errors.hpp"
#include "sgnls/parallel.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <numbers>

namespace sgnls {

namespace {

using cd = std::complex<double>;
using GaussRule = boost::math::quadrature::gauss<double, 8>;

constexpr double kTwoPiHi = 6.283185307179586;
constexpr double kTwoPiLo = 2.4492935982947064e-16;

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// Gauss-Legendre nodes and weights on [0, T] split into equal panels.
template <class F>
void for_each_node(double T, int panels, F&& f) {
  const auto& x = GaussRule::abscissa();
  const auto& w = GaussRule::weights();
  const double h = T / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = (p + 0.5) * h;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double wi = 0.5 * h * w[i];
      if (x[i] == 0.0) {
        f(mid, wi);
      } else {
        f(mid - 0.5 * h * x[i], wi);
        f(mid + 0.5 * h * x[i], wi);
      }
    }
  }
}

std::vector<int> support_of(const SpectralCoeffs& c) {
  std::vector<int> idx;
  for (int i = 0; i < c.size(); ++i)
    if (c.coeffs[i] != cd(0.0)) idx.push_back(i);
  return idx;
}

double spread_of(const SpectralCoeffs& c, const std::vector<int>& support) {
  if (support.empty()) return 0.0;
  double lo = c.basis->lambda(support.front());
  double hi = lo;
  for (int i : support) {
    lo = std::min(lo, c.basis->lambda(i));
    hi = std::max(hi, c.basis->lambda(i));
  }
  return hi - lo;
}

// Synthesis restricted to a fixed set of basis columns.
class SupportSynth {
 public:
  SupportSynth(const SpectralCoeffs& c, std::vector<int> support) : support_(std::move(support)) {
    const auto& phi = c.basis->functions();
    cols_.resize(phi.rows(), static_cast<Eigen::Index>(support_.size()));
    coeffs_.resize(static_cast<Eigen::Index>(support_.size()));
    lambdas_.resize(static_cast<Eigen::Index>(support_.size()));
    for (std::size_t k = 0; k < support_.size(); ++k) {
      cols_.col(static_cast<Eigen::Index>(k)) = phi.col(support_[k]);
      coeffs_[static_cast<Eigen::Index>(k)] = c.coeffs[support_[k]];
      lambdas_[static_cast<Eigen::Index>(k)] = c.basis->lambda(support_[k]);
    }
    level_ = c.basis->level();
  }

  GraphFunction at(double t) const {
    Eigen::MatrixXd parts(coeffs_.size(), 2);
    for (Eigen::Index k = 0; k < coeffs_.size(); ++k) {
      const cd v = coeffs_[k] * unit_phase(t, lambdas_[k]);
      parts(k, 0) = v.real();
      parts(k, 1) = v.imag();
    }
    const Eigen::MatrixXd s = cols_ * parts;
    GraphFunction f{level_, Eigen::VectorXcd(cols_.rows())};
    f.values.real() = s.col(0);
    f.values.imag() = s.col(1);
    return f;
  }

 private:
  std::vector<int> support_;
  Eigen::MatrixXd cols_;
  Eigen::VectorXcd coeffs_;
  Eigen::VectorXd lambdas_;
  int level_ = 0;
};

double l4_fourth(const GraphFunction& f) {
  const auto& w = enumerate_vertices(f.level).weights;
  double sum = 0.0;
  for (int i = 0; i < f.size(); ++i) {
    const double a = std::norm(f.values[i]);
    sum += w[i] * a * a;
  }
  return sum;
}

int find_in_basis(const EigenPair& psi, const EigenBasis& basis) {
  if (psi.values.level != basis.level()) return -1;
  if (psi.localized) {
    const int i = basis.localized_index(psi.localized->j);
    if (i >= 0 && basis.meta(i).localized == psi.localized) return i;
    return -1;
  }
  const Eigen::VectorXd v = psi.values.values.real();
  for (int i = 0; i < basis.size(); ++i)
    if (basis.functions().col(i) == v) return i;
  return -1;
}

}  // namespace

void validate(const NlsConfig& cfg) {
  if (cfg.k < 1) throw ConfigError("nonlinearity order k must be at least 1");
  if (cfg.mu != 1 && cfg.mu != -1) throw ConfigError("mu must be +1 or -1");
  if (!(cfg.dt > 0.0)) throw ConfigError("dt must be positive");
  if (!(cfg.T >= cfg.dt)) throw ConfigError("T must be at least dt");
  if (!(cfg.gamma >= 0.0)) throw ConfigError("gamma must be non-negative");
}

std::complex<double> unit_phase(double t, double lambda) {
  const double hi = t * lambda;
  const double lo = std::fma(t, lambda, -hi);
  const double n = std::nearbyint(hi / kTwoPiHi);
  const double r = (std::fma(-n, kTwoPiHi, hi) - n * kTwoPiLo) + lo;
  return {std::cos(r), -std::sin(r)};
}

SpectralCoeffs propagate(const SpectralCoeffs& c, double t) {
  SpectralCoeffs out = c;
  const auto& lam = c.basis->lambdas();
  for (int i = 0; i < c.size(); ++i) out.coeffs[i] *= unit_phase(t, lam[i]);
  return out;
}

SpectralCoeffs heat_propagate(const SpectralCoeffs& c, double t) {
  if (t < 0.0) throw DomainError("heat semigroup needs t >= 0");
  SpectralCoeffs out = c;
  const auto& lam = c.basis->lambdas();
  for (int i = 0; i < c.size(); ++i) out.coeffs[i] *= std::exp(-t * lam[i]);
  return out;
}

std::complex<double> duhamel_kernel(double t, double lambda_src, double lambda_tgt) {
  const double delta = lambda_src - lambda_tgt;
  if (std::abs(delta) <= kResonanceTolerance * std::max(1.0, std::abs(lambda_src))) return t * unit_phase(t, lambda_tgt);
  const double x = 0.5 * t * delta;
  const double sinc = x == 0.0 ? 1.0 : std::sin(x) / x;
  return t * sinc * unit_phase(t, lambda_tgt) * unit_phase(t, 0.5 * delta);
}

DuhamelResult duhamel_of_eigenfunction(const EigenPair& psi, int k, double t, const BasisPtr& basis,
                                       std::span<const double> s_values) {
  if (k < 1) throw DomainError("nonlinearity order k must be at least 1");
  const int idx = find_in_basis(psi, *basis);
  if (idx < 0) throw DomainError("eigenfunction is not a member of the basis");
  if (psi.values.values.imag().cwiseAbs().maxCoeff() != 0.0) throw DomainError("eigenfunction must be real-valued");

  const auto src = to_coeffs(pointwise_power(psi.values, k), basis);
  DuhamelResult out{SpectralCoeffs::zeros(basis), idx, {}, {}, {}};
  const double lambda = basis->lambda(idx);
  for (int i = 0; i < src.size(); ++i) out.coeffs.coeffs[i] = src.coeffs[i] * duhamel_kernel(t, lambda, basis->lambda(i));

  const double moment = std::pow(lq_norm(psi.values, 2.0 * k + 2.0), 2.0 * k + 2.0);
  for (double s : s_values) {
    out.s.push_back(s);
    out.full_norm.push_back(hs_norm(out.coeffs, s));
    out.resonant_term.push_back(t * std::pow(1.0 + lambda, 0.5 * s) * moment);
  }
  return out;
}

int auto_panels(double horizon, double top_frequency) {
  const double want = std::ceil(8.0 * std::abs(horizon) * top_frequency / (2.0 * std::numbers::pi));
  return static_cast<int>(std::max(32.0, want));
}

SpectralCoeffs duhamel_by_quadrature(const SpectralCoeffs& u0, int k, double t, int panels) {
  const auto& basis = u0.basis;
  const auto support = support_of(u0);
  SpectralCoeffs acc = SpectralCoeffs::zeros(basis);
  if (support.empty() || t == 0.0) return acc;
  if (panels <= 0) {
    double top_src = 0.0;
    for (int i : support) top_src = std::max(top_src, std::abs(basis->lambda(i)));
    const double top = basis->lambdas().cwiseAbs().maxCoeff() + (2 * k + 1) * top_src;
    panels = auto_panels(t, top);
  }
  const SupportSynth synth(u0, support);
  for_each_node(t, panels, [&](double tau, double w) {
    auto inner = to_coeffs(pointwise_power(synth.at(tau), k), basis);
    for (int i = 0; i < acc.size(); ++i) acc.coeffs[i] += w * unit_phase(t - tau, basis->lambda(i)) * inner.coeffs[i];
  });
  return acc;
}

SpectralCoeffs map_derivative(int m, const SpectralCoeffs& u0, double t, int k, int mu, DerivativeRoute route,
                              int panels) {
  if (k < 1) throw DomainError("nonlinearity order k must be at least 1");
  if (m < 0 || m > 2 * k + 1)
    throw DomainError("derivative order " + std::to_string(m) + " unsupported for k=" + std::to_string(k));
  if (m == 0 || (m > 1 && m < 2 * k + 1)) return SpectralCoeffs::zeros(u0.basis);
  if (m == 1) return propagate(u0, t);

  const auto support = support_of(u0);
  SpectralCoeffs duh = SpectralCoeffs::zeros(u0.basis);
  const bool single = support.size() == 1;
  if (route == DerivativeRoute::ClosedForm && !single)
    throw DomainError("closed form needs a single eigenfunction as data");
  if (support.empty()) return duh;
  if (route == DerivativeRoute::Quadrature || !single) {
    duh = duhamel_by_quadrature(u0, k, t, panels);
  } else {
    const int i0 = support.front();
    const cd a = u0.coeffs[i0];
    duh = duhamel_of_eigenfunction(u0.basis->pair(i0), k, t, u0.basis).coeffs;
    duh.coeffs *= std::pow(std::abs(a), 2 * k) * a;
  }
  // i u_t = -Delta u + mu N(u) gives u = S_t u0 - i mu int S_(t-tau) N(u)
  duh.coeffs *= cd(0.0, -static_cast<double>(mu) * factorial(2 * k + 1));
  return duh;
}

double l2_norm(const SpectralCoeffs& c) { return c.coeffs.norm(); }

double l2_distance(const SpectralCoeffs& a, const SpectralCoeffs& b) { return (a.coeffs - b.coeffs).norm(); }

NlsTrajectory nls_solve(const SpectralCoeffs& u0, const NlsConfig& cfg, const NlsOptions& opts) {
  validate(cfg);
  const auto& basis = u0.basis;
  const long steps = std::max(1L, static_cast<long>(std::ceil(cfg.T / cfg.dt - 1e-9)));
  const double h = cfg.T / static_cast<double>(steps);
  const double strength = static_cast<double>(cfg.mu) * opts.nonlinear_scale;

  NlsTrajectory traj;
  SpectralCoeffs u = u0;
  u.coeffs *= cfg.gamma;
  traj.times.push_back(0.0);
  traj.states.push_back(u);
  if (cfg.gamma == 0.0 || u.coeffs.isZero(0.0)) {
    for (long n = 1; n <= steps; ++n) {
      if ((opts.stride > 0 && n % opts.stride == 0) || n == steps) {
        traj.times.push_back(n * h);
        traj.states.push_back(u);
      }
    }
    return traj;
  }

  auto half_phase = [&](GraphFunction& f, double time) {
    if (strength == 0.0) return;
    double peak = 0.0;
    for (int i = 0; i < f.size(); ++i) {
      const double a = std::abs(f.values[i]);
      if (!std::isfinite(a)) throw BlowUpError("non-finite solution value", time);
      peak = std::max(peak, a);
    }
    if (std::pow(peak, 2 * cfg.k) * std::abs(strength) * h >= std::numbers::pi / 4.0)
      throw StepSizeError("nonlinear phase per step exceeds pi/4 at t=" + std::to_string(time));
    for (int i = 0; i < f.size(); ++i) {
      const double phase = strength * std::pow(std::norm(f.values[i]), cfg.k) * 0.5 * h;
      f.values[i] *= cd(std::cos(phase), -std::sin(phase));
    }
  };

  double t = 0.0;
  for (long n = 1; n <= steps; ++n) {
    if (strength != 0.0) {
      auto f = from_coeffs(u);
      half_phase(f, t);
      u = to_coeffs(f, basis);
    }
    u = propagate(u, h);
    if (strength != 0.0) {
      auto f = from_coeffs(u);
      half_phase(f, t);
      u = to_coeffs(f, basis);
    }
    if (!u.coeffs.allFinite()) throw BlowUpError("non-finite coefficients", t);
    t = n * h;
    if ((opts.stride > 0 && n % opts.stride == 0) || n == steps) {
      traj.times.push_back(t);
      traj.states.push_back(u);
    }
  }
  return traj;
}

double default_fd_step(int m, const SpectralCoeffs& u0) {
  const double scale = l2_norm(u0);
  if (scale == 0.0) throw DomainError("finite differences need non-zero data");
  return std::pow(1e-6, 1.0 / (m + 2)) / scale;
}

namespace {

struct StencilPoint {
  int offset;
  double weight;
};

std::vector<StencilPoint> central_stencil(int m) {
  switch (m) {
    case 1: return {{-1, -0.5}, {1, 0.5}};
    case 2: return {{-1, 1.0}, {0, -2.0}, {1, 1.0}};
    case 3: return {{-2, -0.5}, {-1, 1.0}, {1, -1.0}, {2, 0.5}};
    case 4: return {{-2, 1.0}, {-1, -4.0}, {0, 6.0}, {1, -4.0}, {2, 1.0}};
    default: throw DomainError("no central stencil for derivative order " + std::to_string(m));
  }
}

}  // namespace

SpectralCoeffs gamma_derivative_fd(int m, const SpectralCoeffs& u0, double t, const NlsConfig& cfg, double h,
                                   int threads) {
  const auto stencil = central_stencil(m);
  if (h <= 0.0) h = default_fd_step(m, u0);
  std::vector<SpectralCoeffs> values(stencil.size(), SpectralCoeffs::zeros(u0.basis));
  parallel_for(static_cast<int>(stencil.size()), threads, [&](int i) {
    const auto& p = stencil[i];
    if (p.offset == 0) return;  // the zero-data solution vanishes
    NlsConfig run = cfg;
    run.T = t;
    run.gamma = 1.0;
    SpectralCoeffs data = u0;
    data.coeffs *= p.offset * h;
    values[i] = nls_solve(data, run).last();
  });
  SpectralCoeffs out = SpectralCoeffs::zeros(u0.basis);
  for (std::size_t i = 0; i < stencil.size(); ++i) out.coeffs += stencil[i].weight * values[i].coeffs;
  out.coeffs /= std::pow(h, m);
  return out;
}

double strichartz_l4(const SpectralCoeffs& c, double T, int panels) {
  if (!(T > 0.0)) throw DomainError("Strichartz horizon must be positive");
  auto support = support_of(c);
  if (support.empty()) return 0.0;
  if (panels <= 0) panels = auto_panels(T, 2.0 * spread_of(c, support));
  const SupportSynth synth(c, std::move(support));
  double sum = 0.0;
  for_each_node(T, panels, [&](double t, double w) { sum += w * l4_fourth(synth.at(t)); });
  return std::pow(sum, 0.25);
}

double strichartz_duhamel_form(const SpectralCoeffs& c, double T, int panels) {
  if (!(T > 0.0)) throw DomainError("Strichartz horizon must be positive");
  auto support = support_of(c);
  if (support.empty()) return 0.0;
  if (panels <= 0) panels = auto_panels(T, 2.0 * spread_of(c, support));
  const auto end = propagate(c, T);
  const SupportSynth synth(c, std::move(support));
  double sum = 0.0;
  for_each_node(T, panels, [&](double t, double w) {
    const auto cubic = propagate(to_coeffs(pointwise_power(synth.at(t), 1), c.basis), T - t);
    sum += w * cubic.coeffs.dot(end.coeffs).real();
  });
  return sum;
}

}  // namespace sgnls
