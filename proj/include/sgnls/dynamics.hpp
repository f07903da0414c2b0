#pragma once

#include "sgnls/calculus.hpp"
#include "sgnls/spectral.hpp"

#include <complex>
#include <span>
#include <vector>

namespace sgnls {

// i u_t = -Delta u + mu |u|^(2k) u with u(0) = gamma * u0.
struct NlsConfig {
  int k = 1;
  int mu = 1;
  double T = 1.0;
  double dt = 1e-3;
  double gamma = 1.0;
};

void validate(const NlsConfig& cfg);

/// exp(-i t lambda), with t*lambda reduced mod 2pi in extended precision.
std::complex<double> unit_phase(double t, double lambda);

SpectralCoeffs propagate(const SpectralCoeffs& c, double t);
SpectralCoeffs heat_propagate(const SpectralCoeffs& c, double t);

inline constexpr double kResonanceTolerance = 1e-9;

// int_0^t exp(-i(t-tau) tgt) exp(-i tau src) dtau
std::complex<double> duhamel_kernel(double t, double lambda_src, double lambda_tgt);

struct DuhamelResult {
  SpectralCoeffs coeffs;
  int source_index = -1;
  std::vector<double> s;
  std::vector<double> full_norm;
  std::vector<double> resonant_term;
};

/// Duhamel integral of |psi|^(2k) psi along the free flow, term by term.
DuhamelResult duhamel_of_eigenfunction(const EigenPair& psi, int k, double t, const BasisPtr& basis,
                                       std::span<const double> s_values = {});

// Composite 8-point Gauss-Legendre panels resolving the given top frequency.
int auto_panels(double horizon, double top_frequency);

/// int_0^t S_(t-tau)(|S_tau u0|^(2k) S_tau u0) dtau by time quadrature.
/// panels <= 0 picks auto_panels with the integrand's top frequency.
SpectralCoeffs duhamel_by_quadrature(const SpectralCoeffs& u0, int k, double t, int panels = 0);

enum class DerivativeRoute { Auto, ClosedForm, Quadrature };

// m-th gamma-derivative at gamma = 0 of the solution map at time t.
SpectralCoeffs map_derivative(int m, const SpectralCoeffs& u0, double t, int k, int mu = 1,
                              DerivativeRoute route = DerivativeRoute::Auto, int panels = 0);

struct NlsOptions {
  int stride = 0;  // 0 keeps only the initial and final states
  double nonlinear_scale = 1.0;  // test hook, 0 gives the free flow
};

struct NlsTrajectory {
  std::vector<double> times;
  std::vector<SpectralCoeffs> states;
  const SpectralCoeffs& last() const { return states.back(); }
};

/// Strang splitting: half nonlinear phase, exact linear step, half phase.
NlsTrajectory nls_solve(const SpectralCoeffs& u0, const NlsConfig& cfg, const NlsOptions& opts = {});

double default_fd_step(int m, const SpectralCoeffs& u0);

/// Central difference in gamma at gamma = 0 of the solution at time t.
/// h <= 0 uses default_fd_step.
SpectralCoeffs gamma_derivative_fd(int m, const SpectralCoeffs& u0, double t, const NlsConfig& cfg, double h = 0.0,
                                   int threads = 1);

double l2_norm(const SpectralCoeffs& c);
double l2_distance(const SpectralCoeffs& a, const SpectralCoeffs& b);

/// (int_0^T int |S_t u|^4 dmu dt)^(1/4).
double strichartz_l4(const SpectralCoeffs& c, double T, int panels = 0);

/// Re int_0^T <S_(T-t)(|S_t u|^2 S_t u), S_T u> dt, the same quantity
/// reached through the Duhamel pairing.
double strichartz_duhamel_form(const SpectralCoeffs& c, double T, int panels = 0);

}  // namespace sgnls
