#include "doctest.h"

#include "sgnls/calculus.hpp"
#include "sgnls/errors.hpp"

#include <cmath>
#include <map>
#include <random>

using namespace sgnls;

namespace {

using cd = std::complex<double>;

BasisPtr basis(int M, BoundaryCondition bc = BoundaryCondition::Dirichlet) {
  static std::map<std::pair<int, int>, BasisPtr> memo;
  auto& b = memo[{M, static_cast<int>(bc)}];
  if (!b) b = build_basis(M, bc);
  return b;
}

SpectralCoeffs random_coeffs(const BasisPtr& b, std::mt19937_64& rng, int active = -1) {
  std::normal_distribution<double> g;
  auto c = SpectralCoeffs::zeros(b);
  const int n = active < 0 ? c.size() : active;
  for (int i = 0; i < n; ++i) c.coeffs[i] = cd(g(rng), g(rng));
  return c;
}

// direct weighted sum, independent of the basis
double quad_norm(const GraphFunction& f, double q) {
  const auto& vs = enumerate_vertices(f.level);
  double s = 0.0;
  for (int x = 0; x < f.size(); ++x)
    s += static_cast<double>(vs.incident_cells[x].size()) * std::pow(std::abs(f.values[x]), q);
  return std::pow(s / (3.0 * std::pow(3.0, f.level)), 1.0 / q);
}

}  // namespace

TEST_CASE("unit vectors and linearity") {
  const auto b = basis(4);
  const auto phi3 = b->pair(3).values;
  const auto c = to_coeffs(phi3, b);
  for (int i = 0; i < c.size(); ++i) CHECK(std::abs(c.coeffs[i] - cd(i == 3 ? 1.0 : 0.0)) < 1e-12);

  GraphFunction f = GraphFunction::zeros(4);
  f.values = 2.0 * b->functions().col(1).cast<cd>() + cd(0, 1) * b->functions().col(2).cast<cd>();
  const auto d = to_coeffs(f, b);
  CHECK(std::abs(d.coeffs[1] - cd(2.0)) < 1e-12);
  CHECK(std::abs(d.coeffs[2] - cd(0, 1)) < 1e-12);
  CHECK(std::abs(d.coeffs[0]) < 1e-12);

  const auto e0 = from_coeffs(SpectralCoeffs::unit(b, 0));
  CHECK((e0.values.real() - b->functions().col(0)).cwiseAbs().maxCoeff() == 0.0);
  CHECK(from_coeffs(SpectralCoeffs::zeros(b)).values.cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(SpectralCoeffs::unit(b, b->size()), DomainError);
  CHECK_THROWS_AS(to_coeffs(GraphFunction::zeros(3), b), LevelMismatchError);
}

TEST_CASE("cube of the localized function") {
  const auto b = basis(5);
  const int i = b->localized_index(2);
  const auto psi = b->pair(i).values;
  const auto c = to_coeffs(pointwise_power(psi, 1), b);
  CHECK(c.coeffs[i].real() == doctest::Approx(std::pow(quad_norm(psi, 4.0), 4.0)).epsilon(1e-12));
  CHECK(std::abs(c.coeffs[i].imag()) < 1e-14);
}

TEST_CASE("round trip and Parseval on random span elements") {
  std::mt19937_64 rng(7);
  for (auto bc : {BoundaryCondition::Dirichlet, BoundaryCondition::Neumann}) {
    const auto b = basis(5, bc);
    for (int trial = 0; trial < 100; ++trial) {
      const auto c = random_coeffs(b, rng);
      const auto f = from_coeffs(c);
      const auto back = to_coeffs(f, b);
      CHECK((back.coeffs - c.coeffs).norm() <= 1e-8 * c.coeffs.norm());
      CHECK(std::abs(c.coeffs.norm() - quad_norm(f, 2.0)) <= 1e-6 * c.coeffs.norm());
    }
  }
}

TEST_CASE("L^q norms") {
  for (double q : {1.5, 2.0, 4.0, kInf}) CHECK(lq_norm(GraphFunction::constant(3, 1.0), q) == doctest::Approx(1.0));
  for (int j = 2; j <= 5; ++j) CHECK(lq_norm(build_localized(j, 0, 5).values, 2.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(lq_norm(GraphFunction::constant(2, 1.0), 1.0), DomainError);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(vertex_count(2));
  v[7] = -3.0;
  CHECK(lq_norm(GraphFunction::from_real(2, v), kInf) == 3.0);

  std::mt19937_64 rng(11);
  const auto b = basis(4);
  for (int trial = 0; trial < 20; ++trial) {
    const auto f = from_coeffs(random_coeffs(b, rng));
    double prev = 0.0;
    for (double q : {1.5, 2.0, 3.0, 4.0, 6.0, 8.0, kInf}) {
      const double n = lq_norm(f, q);
      if (q != kInf) CHECK(n == doctest::Approx(quad_norm(f, q)).epsilon(1e-12));
      CHECK(n >= prev * (1.0 - 1e-14));
      prev = n;
    }
  }
}

TEST_CASE("Sobolev norms") {
  const auto b = basis(4);
  std::mt19937_64 rng(3);
  const auto c = random_coeffs(b, rng);
  CHECK(hs_norm(c, 0.0) == doctest::Approx(c.coeffs.norm()));
  for (int i : {0, 5, 17}) {
    for (double s : {0.3, 1.0, 1.7}) {
      CHECK(hs_norm(SpectralCoeffs::unit(b, i), s) == doctest::Approx(std::pow(1.0 + b->lambda(i), s / 2.0)));
    }
  }
  CHECK_THROWS_AS(hs_norm(c, -0.1), DomainError);
}

TEST_CASE("embedding exponents") {
  const double ds = 2.0 * std::log(3.0) / std::log(5.0);
  CHECK(sigma_q(4.0) == doctest::Approx(0.341297).epsilon(1e-4));
  CHECK(sigma_q(4.0) == doctest::Approx(ds / 4.0));
  CHECK(sigma_q(6.0) == doctest::Approx(ds / 3.0));
  CHECK(sigma_q(2.0 + 1e-12) < 1e-11);
  CHECK(sigma_q(kInf) == doctest::Approx(ds / 2.0));
  CHECK_THROWS_AS(sigma_q(2.0), DomainError);
}

TEST_CASE("pointwise power") {
  Eigen::VectorXd g = Eigen::VectorXd::LinSpaced(vertex_count(2), -1.0, 2.0);
  const auto f = GraphFunction::from_real(2, g);
  const auto p = pointwise_power(f, 2);
  for (int x = 0; x < f.size(); ++x) CHECK(p.values[x].real() == doctest::Approx(std::pow(g[x], 5)));
  CHECK(pointwise_power(GraphFunction::zeros(2), 3).values.cwiseAbs().maxCoeff() == 0.0);
  const cd phase = std::polar(1.0, 0.7);
  GraphFunction h = f;
  h.values *= phase;
  const auto ph = pointwise_power(h, 1);
  for (int x = 0; x < f.size(); ++x) CHECK(std::abs(ph.values[x] - phase * std::pow(g[x], 3)) < 1e-12);
}

TEST_CASE("dyadic blocks") {
  CHECK(dyadic_edge(1) == 3);
  CHECK(dyadic_edge(2) == 12);
  for (int j = 1; j <= 4; ++j) CHECK(dyadic_edge(j) - dyadic_edge(j - 1) == static_cast<std::int64_t>(std::pow(3, j)));
  const auto b = basis(4);
  std::mt19937_64 rng(5);
  const auto c = random_coeffs(b, rng);
  Eigen::VectorXcd sum = Eigen::VectorXcd::Zero(c.size());
  for (int j = 1; j <= 4; ++j) {
    const auto p = dyadic_project(c, j);
    CHECK(dyadic_project(p, j).coeffs == p.coeffs);
    sum += p.coeffs;
  }
  CHECK(sum == c.coeffs);
  CHECK_THROWS_AS(dyadic_project(c, 5), DomainError);
  CHECK_THROWS_AS(dyadic_project(SpectralCoeffs::zeros(basis(3, BoundaryCondition::Neumann)), 1), DomainError);
}

TEST_CASE("dyadic eigenvalue windows") {
  const auto b = basis(6);
  double lo = 1e300, hi = 0.0;
  for (int j = 1; j <= 5; ++j) {
    const auto [mn, mx] = dyadic_eigenvalue_check(*b, j);
    CHECK(mn > 0.0);
    CHECK(mn <= mx);
    lo = std::min(lo, mn);
    hi = std::max(hi, mx);
  }
  CHECK(lo > 0.1);
  CHECK(hi <= 1.0 + 1e-12);
  CHECK_THROWS_AS(dyadic_eigenvalue_check(*b, 6), DomainError);
  CHECK_THROWS_AS(dyadic_eigenvalue_check(*b, 0), DomainError);
}

TEST_CASE("embedding constant over the level-6 basis") {
  const auto b = basis(6);
  double worst = 0.0;
  for (double q : {4.0, 6.0, 8.0}) {
    const double s = sigma_q(q);
    for (int i = 0; i < b->size(); ++i) {
      const auto phi = SpectralCoeffs::unit(b, i);
      worst = std::max(worst, lq_norm(from_coeffs(phi), q) / hs_norm(phi, s));
    }
  }
  CHECK(worst <= 10.0);
}

TEST_CASE("saturation on the localized family") {
  for (double q : {4.0, 6.0, 8.0}) {
    double lo = 1e300, hi = 0.0;
    for (int j = 2; j <= 6; ++j) {
      const auto psi = build_localized(j, 0, 6);
      const double r = lq_norm(psi.values, q) / std::pow(psi.lambda, sigma_q(q) / 2.0);
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    CHECK(hi / lo <= 4.0);
  }
}
