#pragma once

#include "sgnls/geometry.hpp"
#include "sgnls/spectral.hpp"

#include <Eigen/Dense>

#include <limits>
#include <utility>

namespace sgnls {

struct SpectralCoeffs {
  BasisPtr basis;
  Eigen::VectorXcd coeffs;

  static SpectralCoeffs zeros(BasisPtr basis);
  static SpectralCoeffs unit(BasisPtr basis, int index);
  int size() const { return static_cast<int>(coeffs.size()); }
};

SpectralCoeffs to_coeffs(const GraphFunction& f, const BasisPtr& basis);
GraphFunction from_coeffs(const SpectralCoeffs& c);

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// L^q(mu) norm by quadrature; q = kInf gives the vertex maximum.
double lq_norm(const GraphFunction& f, double q);

/// sqrt(sum (1+Lambda)^s |c|^2)
double hs_norm(const SpectralCoeffs& c, double s);

/// Sobolev index at which H^s embeds in L^q.
double sigma_q(double q);

// |f|^(2k) f pointwise
GraphFunction pointwise_power(const GraphFunction& f, int k);

/// Dirichlet count N_j = (3^(j+1)-3)/2.
std::int64_t dyadic_edge(int j);

// Keeps coefficients with index in (N_{j-1}, N_j].
SpectralCoeffs dyadic_project(const SpectralCoeffs& c, int j);

// min and max of Lambda_k / Lambda_j over the j-th window, Lambda_j = c6 5^j.
std::pair<double, double> dyadic_eigenvalue_check(const EigenBasis& basis, int j);

double l2_inner_real(const GraphFunction& f, const GraphFunction& g);

}  // namespace sgnls
