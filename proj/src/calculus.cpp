#include "sgnls/calculus.hpp"

#include "sgnls/errors.hpp"

#include <cmath>

namespace sgnls {

SpectralCoeffs SpectralCoeffs::zeros(BasisPtr basis) {
  const int n = basis->size();
  return {std::move(basis), Eigen::VectorXcd::Zero(n)};
}

SpectralCoeffs SpectralCoeffs::unit(BasisPtr basis, int index) {
  auto c = zeros(std::move(basis));
  if (index < 0 || index >= c.size()) throw DomainError("basis index out of range");
  c.coeffs[index] = 1.0;
  return c;
}

SpectralCoeffs to_coeffs(const GraphFunction& f, const BasisPtr& basis) {
  if (f.level != basis->level() || f.size() != basis->vertices())
    throw LevelMismatchError("function level " + std::to_string(f.level) + " vs basis level " +
                             std::to_string(basis->level()));
  const auto& w = basis->weights();
  Eigen::MatrixXd parts(f.size(), 2);
  parts.col(0) = w.cwiseProduct(f.values.real());
  parts.col(1) = w.cwiseProduct(f.values.imag());
  const Eigen::MatrixXd proj = basis->functions().transpose() * parts;
  SpectralCoeffs out{basis, Eigen::VectorXcd(basis->size())};
  out.coeffs.real() = proj.col(0);
  out.coeffs.imag() = proj.col(1);
  return out;
}

GraphFunction from_coeffs(const SpectralCoeffs& c) {
  const auto& b = *c.basis;
  if (c.size() != b.size()) throw LevelMismatchError("coefficient count does not match basis");
  Eigen::MatrixXd parts(c.size(), 2);
  parts.col(0) = c.coeffs.real();
  parts.col(1) = c.coeffs.imag();
  const Eigen::MatrixXd synth = b.functions() * parts;
  GraphFunction out{b.level(), Eigen::VectorXcd(b.vertices())};
  out.values.real() = synth.col(0);
  out.values.imag() = synth.col(1);
  return out;
}

double lq_norm(const GraphFunction& f, double q) {
  if (!(q > 1.0)) throw DomainError("L^q norm needs q > 1");
  if (std::isinf(q)) return f.size() ? f.values.cwiseAbs().maxCoeff() : 0.0;
  const auto& w = enumerate_vertices(f.level).weights;
  if (static_cast<std::size_t>(f.size()) != w.size()) throw LevelMismatchError("function length does not match level");
  double sum = 0.0;
  for (int i = 0; i < f.size(); ++i) sum += w[i] * std::pow(std::abs(f.values[i]), q);
  return std::pow(sum, 1.0 / q);
}

double hs_norm(const SpectralCoeffs& c, double s) {
  if (s < 0.0) throw DomainError("negative Sobolev index");
  const auto& lam = c.basis->lambdas();
  double sum = 0.0;
  for (int i = 0; i < c.size(); ++i) sum += std::pow(1.0 + lam[i], s) * std::norm(c.coeffs[i]);
  return std::sqrt(sum);
}

double sigma_q(double q) {
  if (!(q > 2.0)) throw DomainError("sigma_q needs q > 2");
  if (std::isinf(q)) return 0.5 * spectral_dimension();
  return 0.5 * spectral_dimension() * (1.0 - 2.0 / q);
}

GraphFunction pointwise_power(const GraphFunction& f, int k) {
  if (k < 0) throw DomainError("negative power");
  GraphFunction out = f;
  for (int i = 0; i < f.size(); ++i) out.values[i] *= std::pow(std::norm(f.values[i]), k);
  return out;
}

std::int64_t dyadic_edge(int j) { return interior_count(j); }

SpectralCoeffs dyadic_project(const SpectralCoeffs& c, int j) {
  if (c.basis->bc() != BoundaryCondition::Dirichlet) throw DomainError("dyadic blocks use the Dirichlet basis");
  if (j < 1) throw DomainError("dyadic block index starts at 1");
  const auto lo = j == 1 ? 0 : dyadic_edge(j - 1);
  const auto hi = dyadic_edge(j);
  if (hi > c.size()) throw DomainError("dyadic window " + std::to_string(j) + " exceeds the basis");
  SpectralCoeffs out = SpectralCoeffs::zeros(c.basis);
  out.coeffs.segment(lo, hi - lo) = c.coeffs.segment(lo, hi - lo);
  return out;
}

std::pair<double, double> dyadic_eigenvalue_check(const EigenBasis& basis, int j) {
  if (basis.bc() != BoundaryCondition::Dirichlet) throw DomainError("dyadic blocks use the Dirichlet basis");
  if (j < 1 || j > basis.level() - 1)
    throw DomainError("dyadic window " + std::to_string(j) + " needs sampling level at least j+1");
  const auto lo = j == 1 ? 0 : dyadic_edge(j - 1);
  const auto hi = dyadic_edge(j);
  const double ref = localized_constant() * std::pow(5.0, j);
  const auto window = basis.lambdas().segment(lo, hi - lo) / ref;
  return {window.minCoeff(), window.maxCoeff()};
}

double l2_inner_real(const GraphFunction& f, const GraphFunction& g) {
  const auto& w = enumerate_vertices(f.level).weights;
  double sum = 0.0;
  for (int i = 0; i < f.size(); ++i) sum += w[i] * std::real(f.values[i] * std::conj(g.values[i]));
  return sum;
}

}  // namespace sgnls
