#include "doctest.h"

#include "sgnls/errors.hpp"
#include "sgnls/geometry.hpp"
#include "sgnls/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

using namespace sgnls;

namespace {

std::vector<double> sorted_values(const Eigen::VectorXd& v) {
  std::vector<double> out(v.data(), v.data() + v.size());
  std::sort(out.begin(), out.end());
  return out;
}

void check_values(const Eigen::VectorXd& got, std::vector<double> want, double tol = 1e-12) {
  std::sort(want.begin(), want.end());
  const auto g = sorted_values(got);
  REQUIRE(g.size() == want.size());
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(g[i] == doctest::Approx(want[i]).epsilon(tol));
}

double l2_sq(const GraphFunction& f) {
  const auto& w = enumerate_vertices(f.level).weights;
  double s = 0.0;
  for (int i = 0; i < f.size(); ++i) s += w[i] * std::norm(f.values[i]);
  return s;
}

// x(5-x) = y, both roots
std::pair<double, double> preimages(double y) {
  const double d = std::sqrt(25.0 - 4.0 * y);
  return {(5.0 - d) / 2.0, (5.0 + d) / 2.0};
}

}  // namespace

TEST_CASE("boundary condition names") {
  CHECK(to_string(BoundaryCondition::Dirichlet) == "dirichlet");
  CHECK(parse_boundary_condition("neumann") == BoundaryCondition::Neumann);
  CHECK_THROWS_AS(parse_boundary_condition("robin"), ConfigError);
}

TEST_CASE("graph energy small cases") {
  CHECK(graph_energy(GraphFunction::constant(3, 2.5), 3) == 0.0);
  Eigen::VectorXd e0(3);
  e0 << 1, 0, 0;
  CHECK(graph_energy(GraphFunction::from_real(0, e0), 0) == doctest::Approx(2.0));
  // restriction from a finer level uses only the prefix
  Eigen::VectorXd fine = Eigen::VectorXd::Zero(vertex_count(2));
  fine[0] = 1.0;
  fine[10] = 7.0;
  CHECK(graph_energy(GraphFunction::from_real(2, fine), 0) == doctest::Approx(2.0));
  CHECK_THROWS_AS(graph_energy(GraphFunction::from_real(0, e0), 1), LevelMismatchError);
}

TEST_CASE("harmonic extension keeps renormalized energy") {
  // level-0 data extended harmonically: each midpoint is (2a+2b+c)/5
  Eigen::VectorXd h0(3);
  h0 << 1, 0, 0;
  GraphFunction h = GraphFunction::from_real(0, h0);
  const double e0 = graph_energy(h, 0, true);
  for (int m = 1; m <= 4; ++m) {
    const auto& vs = enumerate_vertices(m);
    GraphFunction next = GraphFunction::zeros(m);
    next.values.head(h.size()) = h.values;
    const auto& coarse = enumerate_vertices(m - 1);
    for (std::size_t c = 0; c < coarse.cells.size(); ++c) {
      const auto& x = coarse.cells[c];
      for (int a = 0; a < 3; ++a) {
        const int b = (a + 1) % 3;
        const int o = (a + 2) % 3;
        // midpoint of corners a, b is shared by children a and b
        const auto& ca = vs.cells[3 * c + a];
        const int mid = ca[b];
        next.values[mid] = (2.0 * h.values[x[a]] + 2.0 * h.values[x[b]] + h.values[x[o]]) / 5.0;
      }
    }
    h = next;
    CHECK(graph_energy(h, m, true) == doctest::Approx(e0).epsilon(1e-12));
  }
}

TEST_CASE("laplacian on small examples") {
  Eigen::VectorXd u(6);
  u << 0, 0, 0, 1, 1, 1;
  auto lap = graph_laplacian_apply(GraphFunction::from_real(1, u), 1, BoundaryCondition::Dirichlet);
  for (int i = 3; i < 6; ++i) CHECK(-lap.values[i].real() == doctest::Approx(2.0));
  for (int i = 0; i < 3; ++i) CHECK(lap.values[i] == std::complex<double>(0.0));
  u << 0, 0, 0, 1, -1, 0;
  lap = graph_laplacian_apply(GraphFunction::from_real(1, u), 1, BoundaryCondition::Dirichlet);
  for (int i = 3; i < 6; ++i) CHECK(-lap.values[i].real() == doctest::Approx(5.0 * u[i]));
  lap = graph_laplacian_apply(GraphFunction::constant(4, 3.0), 4, BoundaryCondition::Neumann);
  CHECK(lap.values.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("small spectra in closed form") {
  check_values(graph_spectrum(1, BoundaryCondition::Dirichlet).values, {2, 5, 5});
  check_values(graph_spectrum(0, BoundaryCondition::Neumann).values, {0, 3, 3});
  check_values(graph_spectrum(0, BoundaryCondition::Neumann, GraphMeasure::Quadrature).values, {0, 6, 6});
  check_values(graph_spectrum(1, BoundaryCondition::Neumann, GraphMeasure::Quadrature).values, {0, 3, 3, 6, 6, 6});
  CHECK_THROWS_AS(graph_spectrum(0, BoundaryCondition::Dirichlet), DomainError);

  const auto [a, b] = preimages(2.0);
  const auto [c, d] = preimages(5.0);
  check_values(graph_spectrum(2, BoundaryCondition::Dirichlet).values, {a, b, c, c, d, d, 5, 5, 5, 6, 6, 6}, 1e-11);
}

TEST_CASE("spectrum sizes and eigenvector normalization") {
  for (int m = 1; m <= 4; ++m) {
    const auto d = graph_spectrum(m, BoundaryCondition::Dirichlet);
    CHECK(d.values.size() == interior_count(m));
    CHECK(d.vectors.rows() == vertex_count(m));
    CHECK(d.vectors.topRows(3).cwiseAbs().maxCoeff() == 0.0);
    const Eigen::MatrixXd g = d.vectors.transpose() * d.vectors;
    CHECK((g - Eigen::MatrixXd::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff() < 1e-12);
    for (int k = 0; k < d.vectors.cols(); ++k) {
      Eigen::Index at = 0;
      d.vectors.col(k).cwiseAbs().maxCoeff(&at);
      CHECK(d.vectors(at, k) > 0.0);
    }
    const auto n = graph_spectrum(m, BoundaryCondition::Neumann);
    CHECK(n.values.size() == vertex_count(m));
    CHECK(std::abs(n.values[0]) < 1e-12);
  }
}

TEST_CASE("spectra decimate between levels") {
  // every level-(m+1) value either is born there or maps into level m
  for (auto [bc, measure] : {std::pair{BoundaryCondition::Dirichlet, GraphMeasure::Counting},
                             std::pair{BoundaryCondition::Neumann, GraphMeasure::Quadrature}}) {
    for (int m = 1; m <= 3; ++m) {
      const auto coarse = sorted_values(graph_spectrum(m, bc, measure).values);
      const auto fine = sorted_values(graph_spectrum(m + 1, bc, measure).values);
      for (double x : fine) {
        if (is_forbidden(x, 1e-9)) continue;
        const double y = x * (5.0 - x);
        const bool hit = std::any_of(coarse.begin(), coarse.end(), [&](double c) { return std::abs(c - y) < 1e-9; });
        CHECK_MESSAGE(hit, "value " << x << " at level " << m + 1);
      }
    }
  }
}

TEST_CASE("decimation maps") {
  CHECK(decimate_up(2.0) == 6.0);
  CHECK(decimate_up(3.0) == 6.0);
  CHECK(decimate_down(6.0) == doctest::Approx(2.0));
  CHECK(decimate_plus(6.0) == doctest::Approx(3.0));
  CHECK(decimate_down(0.0) == 0.0);
  const double tiny = 1e-300;
  CHECK(decimate_down(tiny) == doctest::Approx(tiny / 5.0));
  for (double x : {0.1, 1.0, 4.0, 6.25}) {
    CHECK(decimate_up(decimate_down(x)) == doctest::Approx(x).epsilon(1e-14));
    CHECK(decimate_up(decimate_plus(x)) == doctest::Approx(x).epsilon(1e-14));
  }
  CHECK_THROWS_AS(decimate_down(7.0), DomainError);
  CHECK_THROWS_AS(decimate_down(-1.0), DomainError);
  CHECK_THROWS_AS(decimate_down(std::nan("")), DomainError);
  CHECK(is_forbidden(5.0));
  CHECK(is_forbidden(2.0 + 1e-11));
  CHECK_FALSE(is_forbidden(3.0));
}

TEST_CASE("renormalized eigenvalues") {
  CHECK(renormalize_eigenvalue(0.0, 3) == 0.0);
  // the limit is a fixed point of the level shift
  const double a = renormalize_eigenvalue(2.0, 1);
  CHECK(renormalize_eigenvalue(decimate_down(2.0), 2) == doctest::Approx(a).epsilon(1e-13));
  // a value born as 6 takes the 3 branch first
  CHECK(renormalize_eigenvalue(6.0, 2) == doctest::Approx(renormalize_eigenvalue(3.0, 3)).epsilon(1e-14));
  CHECK(localized_eigenvalue(2) == doctest::Approx(677.8606349789444).epsilon(1e-12));
  CHECK(localized_constant() == doctest::Approx(27.114425399157778).epsilon(1e-12));
  // born at level 1 it sits one factor 5 below psi_2
  CHECK(renormalize_eigenvalue(6.0, 1) == doctest::Approx(677.8606349789444 / 5.0).epsilon(1e-12));
  for (int j = 2; j <= 6; ++j)
    CHECK(localized_eigenvalue(j + 1) / localized_eigenvalue(j) == doctest::Approx(5.0).epsilon(1e-12));
  CHECK_THROWS_AS(renormalize_eigenvalue(1.0, -1), DomainError);
  CHECK_THROWS_AS(renormalize_eigenvalue(7.0, 1), DomainError);
}

TEST_CASE("extension preserves the eigen-equation") {
  const auto spec = graph_spectrum(1, BoundaryCondition::Dirichlet);
  GraphFunction u = GraphFunction::from_real(1, spec.vectors.col(0));
  double lambda = spec.values[0];
  for (int m = 1; m <= 4; ++m) {
    const double next = decimate_down(lambda);
    const auto v = extend_eigenfunction(u, next);
    CHECK(v.level == m + 1);
    CHECK((v.values.head(u.size()) - u.values).cwiseAbs().maxCoeff() == 0.0);
    const auto lap = graph_laplacian_apply(v, m + 1, BoundaryCondition::Dirichlet);
    const auto& vs = enumerate_vertices(m + 1);
    for (int x = 3; x < vs.size(); ++x)
      CHECK(std::abs(-lap.values[x] - next * v.values[x]) < 1e-10);
    u = v;
    lambda = next;
  }
  CHECK_THROWS_AS(extend_eigenfunction(u, 5.0), ForbiddenEigenvalueError);
  CHECK_THROWS_AS(extend_eigenfunction(u, 0.5), PreconditionError);
}

TEST_CASE("localized seed") {
  for (int j = 2; j <= 5; ++j) {
    const auto seed = build_localized_seed(j);
    CHECK(seed.residual == 0.0);
    CHECK(seed.values.values[seed.junction_vertex].real() == 2.0);
    CHECK(seed.descriptor.j == j);
  }
  const auto s2 = build_localized_seed(2);
  CHECK(s2.descriptor.first.str() == "0");
  CHECK(s2.descriptor.second.str() == "1");
  const auto s4 = build_localized_seed(4);
  CHECK(s4.descriptor.first.str() == "011");
  CHECK(s4.descriptor.second.str() == "100");
  // the three junctions give eigenfunctions too
  for (int junction = 0; junction < 3; ++junction) CHECK(build_localized_seed(3, junction).residual == 0.0);
  CHECK_THROWS_AS(build_localized_seed(1), DomainError);
  CHECK_THROWS_AS(build_localized_seed(3, 3), DomainError);
}

TEST_CASE("localized eigenfunctions") {
  const auto psi = build_localized(3, 0, 6);
  CHECK(psi.birth_level == 3);
  CHECK(psi.lambda == doctest::Approx(5.0 * localized_eigenvalue(2)).epsilon(1e-12));
  CHECK(psi.graph_history.size() == 4u);
  CHECK(psi.graph_history[0] == 6.0);
  CHECK(psi.graph_history[1] == 3.0);
  CHECK(l2_sq(psi.values) == doctest::Approx(1.0).epsilon(1e-13));

  // vanishes outside the two cells
  const auto& vs = enumerate_vertices(6);
  std::vector<bool> inside(static_cast<std::size_t>(vs.size()), false);
  for (const auto& w : {psi.localized->first, psi.localized->second}) {
    CHECK(w.size() == 2);
    const std::int64_t shift = static_cast<std::int64_t>(std::pow(3, 6 - w.size()));
    for (std::int64_t c = w.index() * shift; c < (w.index() + 1) * shift; ++c)
      for (int id : vs.cells[c]) inside[id] = true;
  }
  for (int x = 0; x < vs.size(); ++x)
    if (!inside[x]) CHECK(psi.values.values[x] == std::complex<double>(0.0));

  CHECK_THROWS_AS(build_localized(4, 0, 3), LevelMismatchError);
}

TEST_CASE("localized residual converges with level") {
  const double r6 = eigen_residual(build_localized(2, 0, 6), 6);
  const double r7 = eigen_residual(build_localized(2, 0, 7), 7);
  CHECK(r6 <= 1e-2);
  CHECK(r7 <= r6 / 4.0);
  CHECK(eigen_residual(build_localized(2, 0, 6), 6, true) <= 1e-10);
  // also an eigenfunction of the weighted Neumann problem
  CHECK(eigen_residual(build_localized(2, 0, 6, BoundaryCondition::Neumann), 6, true) <= 1e-10);
}

TEST_CASE("energy of the localized function approaches its eigenvalue") {
  const double target = localized_eigenvalue(2);
  const auto p6 = build_localized(2, 0, 6);
  const auto p7 = build_localized(2, 0, 7);
  const double e6 = graph_energy(p6.values, 6, true) / l2_sq(p6.values);
  const double e7 = graph_energy(p7.values, 7, true) / l2_sq(p7.values);
  CHECK(std::abs(e6 / target - 1.0) < 1e-2);
  CHECK(std::abs(e7 / target - 1.0) < std::abs(e6 / target - 1.0));
}

TEST_CASE("birth levels") {
  CHECK(infer_birth_level(2.0, 1, BoundaryCondition::Dirichlet) == 1);
  CHECK(infer_birth_level(decimate_down(decimate_down(2.0)), 3, BoundaryCondition::Dirichlet) == 1);
  CHECK(infer_birth_level(decimate_down(5.0), 4, BoundaryCondition::Dirichlet) == 3);
  CHECK(infer_birth_level(decimate_down(3.0), 5, BoundaryCondition::Dirichlet) == 3);
  CHECK(infer_birth_level(0.0, 5, BoundaryCondition::Neumann) == 5);
  CHECK(infer_birth_level(decimate_down(3.0), 2, BoundaryCondition::Neumann) == 0);
}

TEST_CASE("eigenbasis at level 2") {
  const auto b = build_basis(2, BoundaryCondition::Dirichlet);
  CHECK(b->size() == 12);
  CHECK(b->vertices() == 15);
  for (int i = 1; i < b->size(); ++i) CHECK(b->lambda(i) >= b->lambda(i - 1));
  const auto& phi = b->functions();
  const Eigen::MatrixXd g = phi.transpose() * b->weights().asDiagonal() * phi;
  CHECK((g - Eigen::MatrixXd::Identity(12, 12)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(b->lambda(0) == doctest::Approx(renormalize_eigenvalue(2.0, 1)).epsilon(1e-12));
  const int i = b->localized_index(2);
  REQUIRE(i >= 0);
  CHECK(b->lambda(i) == localized_eigenvalue(2));
  CHECK(b->localized_index(3) == -1);
}

TEST_CASE("eigenbasis at level 5") {
  for (auto bc : {BoundaryCondition::Dirichlet, BoundaryCondition::Neumann}) {
    const int M = 5;
    const auto b = build_basis(M, bc);
    CHECK(b->size() == (bc == BoundaryCondition::Dirichlet ? interior_count(M) : vertex_count(M)));
    const auto& phi = b->functions();
    const Eigen::MatrixXd g = phi.transpose() * b->weights().asDiagonal() * phi;
    CHECK((g - Eigen::MatrixXd::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff() < 1e-10);
    for (int i = 1; i < b->size(); ++i) CHECK(b->lambda(i) >= b->lambda(i - 1));

    for (int j = 2; j <= M; ++j) {
      const int i = b->localized_index(j);
      REQUIRE(i >= 0);
      const auto psi = build_localized(j, 0, M, bc);
      CHECK(b->functions().col(i) == psi.values.values.real());
      CHECK(b->meta(i).birth_level == j);
    }
    // every member solves the graph problem with its own history
    double worst = 0.0;
    for (int i = 0; i < b->size(); ++i) worst = std::max(worst, eigen_residual(b->pair(i), M, true));
    CHECK(worst < 1e-8);
    if (bc == BoundaryCondition::Neumann) {
      CHECK(b->lambda(0) == 0.0);
      CHECK(eigen_residual(b->pair(0), M) < 1e-9);
    }
  }
}

TEST_CASE("quadrature is consistent across levels") {
  const int M = 5;
  const auto b = build_basis(M, BoundaryCondition::Dirichlet);
  for (int i = 0; i < 20; ++i) {
    const auto p = b->pair(i);
    const double next = decimate_down(p.graph_eigenvalue());
    const auto up = extend_eigenfunction(p.values, next);
    CHECK(l2_sq(up) == doctest::Approx(1.0).epsilon(2e-2));
    for (int k = 0; k < i; ++k) {
      const auto q = b->pair(k);
      const auto upq = extend_eigenfunction(q.values, decimate_down(q.graph_eigenvalue()));
      const auto& w = enumerate_vertices(M + 1).weights;
      double dot = 0.0;
      for (int x = 0; x < up.size(); ++x) dot += w[x] * (up.values[x] * std::conj(upq.values[x])).real();
      CHECK(std::abs(dot) < 2e-2);
    }
  }
}
