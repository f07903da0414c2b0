#include "sgnls/spectral.hpp"

#include "sgnls/errors.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace sgnls {

std::string to_string(BoundaryCondition bc) {
  return bc == BoundaryCondition::Dirichlet ? "dirichlet" : "neumann";
}

BoundaryCondition parse_boundary_condition(std::string_view text) {
  if (text == "dirichlet" || text == "D") return BoundaryCondition::Dirichlet;
  if (text == "neumann" || text == "N") return BoundaryCondition::Neumann;
  throw ConfigError("unknown boundary condition '" + std::string(text) + "'");
}

namespace {

double quadrature_mass(const VertexSet& vs, int id) { return vs.is_boundary(id) ? 0.5 : 1.0; }

void require_covers(const GraphFunction& u, int m) {
  if (u.level < m || u.size() != vertex_count(u.level))
    throw LevelMismatchError("function on level " + std::to_string(u.level) + " cannot be restricted to level " +
                             std::to_string(m));
}

}  // namespace

double graph_energy(const GraphFunction& u, int m, bool renormalized) {
  require_covers(u, m);
  const auto& vs = enumerate_vertices(m);
  double e = 0.0;
  for (int x = 0; x < vs.size(); ++x)
    for (int y : vs.neighbors[x])
      if (y > x) e += std::norm(u.values[y] - u.values[x]);
  // each edge once gives the half sum over ordered pairs
  return renormalized ? std::pow(5.0 / 3.0, m) * e : e;
}

GraphFunction graph_laplacian_apply(const GraphFunction& u, int m, BoundaryCondition bc, GraphMeasure measure) {
  require_covers(u, m);
  const auto& vs = enumerate_vertices(m);
  GraphFunction out = GraphFunction::zeros(m);
  const bool dirichlet = bc == BoundaryCondition::Dirichlet;
  for (int x = 0; x < vs.size(); ++x) {
    if (dirichlet && vs.is_boundary(x)) continue;
    const std::complex<double> ux = u.values[x];
    std::complex<double> acc = 0.0;
    for (int y : vs.neighbors[x]) {
      const std::complex<double> uy = (dirichlet && vs.is_boundary(y)) ? 0.0 : u.values[y];
      acc += uy - ux;
    }
    if (!dirichlet && measure == GraphMeasure::Quadrature) acc /= quadrature_mass(vs, x);
    out.values[x] = acc;
  }
  return out;
}

GraphSpectrum graph_spectrum(int m, BoundaryCondition bc, GraphMeasure measure) {
  const auto& vs = enumerate_vertices(m);
  const bool dirichlet = bc == BoundaryCondition::Dirichlet;
  const int offset = dirichlet ? 3 : 0;
  const int n = vs.size() - offset;
  if (n <= 0) throw DomainError("level 0 has no Dirichlet spectrum");

  Eigen::VectorXd scale = Eigen::VectorXd::Ones(n);
  if (!dirichlet && measure == GraphMeasure::Quadrature)
    for (int i = 0; i < n; ++i) scale[i] = 1.0 / std::sqrt(quadrature_mass(vs, i));

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int x = offset; x < vs.size(); ++x) {
    const int i = x - offset;
    a(i, i) = static_cast<double>(vs.degree(x)) * scale[i] * scale[i];
    for (int y : vs.neighbors[x]) {
      if (y < offset) continue;
      a(i, y - offset) = -scale[i] * scale[y - offset];
    }
  }

  Eigen::VectorXd w(n);
  const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'U', n, a.data(), n, w.data());
  if (info != 0)
    throw NumericError("dsyevd failed with info=" + std::to_string(info) + " at level " + std::to_string(m) + " (" +
                       to_string(bc) + ")");

  GraphSpectrum out;
  out.level = m;
  out.bc = bc;
  out.measure = measure;
  out.values = w;
  out.vectors = Eigen::MatrixXd::Zero(vs.size(), n);
  for (int k = 0; k < n; ++k) {
    Eigen::VectorXd col = a.col(k).cwiseProduct(scale);
    Eigen::Index at = 0;
    col.cwiseAbs().maxCoeff(&at);
    if (col[at] < 0.0) col = -col;
    out.vectors.col(k).segment(offset, n) = col;
  }
  return out;
}

bool is_forbidden(double lambda, double tol) {
  return std::any_of(std::begin(kForbiddenValues), std::end(kForbiddenValues),
                     [&](double f) { return std::abs(lambda - f) <= tol; });
}

namespace {

double discriminant(double lambda) {
  if (!std::isfinite(lambda)) throw DomainError("non-finite eigenvalue");
  if (lambda > 6.25) throw DomainError("eigenvalue " + std::to_string(lambda) + " exceeds 25/4");
  if (lambda < -1e-12) throw DomainError("negative eigenvalue " + std::to_string(lambda));
  return std::sqrt(std::max(0.0, 25.0 - 4.0 * lambda));
}

}  // namespace

double decimate_down(double lambda) {
  const double d = discriminant(lambda);
  lambda = std::max(lambda, 0.0);
  // (5 - d)/2 written without cancellation
  return 2.0 * lambda / (5.0 + d);
}

double decimate_plus(double lambda) { return 0.5 * (5.0 + discriminant(lambda)); }

double decimate_up(double lambda) { return lambda * (5.0 - lambda); }

double renormalize_eigenvalue(double lambda_birth, int birth_level) {
  if (birth_level < 0) throw DomainError("negative birth level");
  double lambda = lambda_birth;
  int level = birth_level;
  if (std::abs(lambda - 6.0) <= 1e-9) {
    lambda = 3.0;
    ++level;
  } else {
    discriminant(lambda);
  }
  if (lambda <= 0.0) return 0.0;
  double prev = 1.5 * std::pow(5.0, level) * lambda;
  for (int it = 0; it < 60; ++it) {
    lambda = decimate_down(lambda);
    ++level;
    const double cur = 1.5 * std::pow(5.0, level) * lambda;
    if (std::abs(cur - prev) <= 1e-14 * cur) return cur;
    prev = cur;
  }
  throw NumericError("renormalization did not converge for " + std::to_string(lambda_birth));
}

GraphFunction extend_eigenfunction(const GraphFunction& u, double lambda_next) {
  if (is_forbidden(lambda_next))
    throw ForbiddenEigenvalueError("extension with forbidden eigenvalue " + std::to_string(lambda_next));
  const int m = u.level;
  const auto& coarse = enumerate_vertices(m);
  if (u.size() != coarse.size()) throw LevelMismatchError("function length does not match level");
  const auto& fine = enumerate_vertices(m + 1);

  // interior eigen-equation at the coarse level
  const double lambda_m = decimate_up(lambda_next);
  const double scale = std::max(1.0, u.values.cwiseAbs().maxCoeff());
  const auto lap = graph_laplacian_apply(u, m, BoundaryCondition::Neumann);
  for (int x = 3; x < coarse.size(); ++x) {
    if (std::abs(-lap.values[x] - lambda_m * u.values[x]) > 1e-9 * scale * (8.0 + lambda_m))
      throw PreconditionError("input is not a level-" + std::to_string(m) + " eigenfunction for " +
                              std::to_string(lambda_m));
  }

  GraphFunction out = GraphFunction::zeros(m + 1);
  out.values.head(coarse.size()) = u.values;
  const double denom = (2.0 - lambda_next) * (5.0 - lambda_next);
  const double edge = 4.0 - lambda_next;
  for (std::size_t c = 0; c < coarse.cells.size(); ++c) {
    const auto& x = coarse.cells[c];
    // midpoint opposite corner a: (x1,x2) -> child 1 corner 2, (x0,x2) -> child 0 corner 2,
    // (x0,x1) -> child 0 corner 1
    const int opposite[3] = {fine.cells[3 * c + 1][2], fine.cells[3 * c][2], fine.cells[3 * c][1]};
    for (int a = 0; a < 3; ++a) {
      const auto u0 = u.values[x[a]];
      const auto u1 = u.values[x[(a + 1) % 3]];
      const auto u2 = u.values[x[(a + 2) % 3]];
      out.values[opposite[a]] = (edge * (u1 + u2) + 2.0 * u0) / denom;
    }
  }
  return out;
}

namespace {

constexpr int kJunctionEnds[3][2] = {{0, 1}, {0, 2}, {1, 2}};

}  // namespace

LocalizedSeed build_localized_seed(int j, int junction) {
  if (j < 2) throw DomainError("localized functions start at level 2");
  if (junction < 0 || junction > 2) throw DomainError("junction index must be 0, 1 or 2");
  const int a = kJunctionEnds[junction][0];
  const int b = kJunctionEnds[junction][1];

  std::string w(1, static_cast<char>('0' + a));
  std::string w2(1, static_cast<char>('0' + b));
  w.append(static_cast<std::size_t>(j - 2), static_cast<char>('0' + b));
  w2.append(static_cast<std::size_t>(j - 2), static_cast<char>('0' + a));
  LocalizedDescriptor desc{j, junction, CellAddress(w), CellAddress(w2)};

  const auto& vs = enumerate_vertices(j);
  std::set<int> inside;
  for (const auto& addr : {desc.first, desc.second})
    for (int i = 0; i < 3; ++i)
      for (int id : vs.cells[3 * addr.index() + i]) inside.insert(id);

  const auto& base = enumerate_vertices(0).points;
  const std::int64_t half = std::int64_t{1} << (j - 1);
  const LatticePoint at{(base[a].u + base[b].u) * half, (base[a].v + base[b].v) * half};
  const int p = vs.find(at);
  if (p < 0) throw ConstructionError("junction point missing from vertex set");

  Eigen::VectorXd v = Eigen::VectorXd::Zero(vs.size());
  v[p] = 2.0;
  std::set<int> ring;
  for (int y : vs.neighbors[p])
    if (inside.contains(y)) ring.insert(y);
  for (int y : ring) v[y] = -1.0;
  for (int x : inside) {
    if (x == p || ring.contains(x)) continue;
    int hits = 0;
    for (int y : vs.neighbors[x]) hits += ring.contains(y) ? 1 : 0;
    if (hits >= 2) v[x] = 1.0;
  }

  LocalizedSeed seed;
  seed.values = GraphFunction::from_real(j, v);
  seed.junction_vertex = p;
  seed.descriptor = desc;
  const auto lap = graph_laplacian_apply(seed.values, j, BoundaryCondition::Neumann);
  seed.residual = (-lap.values - 6.0 * seed.values.values).cwiseAbs().maxCoeff();
  return seed;
}

EigenPair build_localized(int j, int junction, int M, BoundaryCondition bc) {
  if (M < j) throw LevelMismatchError("sampling level " + std::to_string(M) + " below birth level " + std::to_string(j));
  auto seed = build_localized_seed(j, junction);
  if (seed.residual > 1e-12)
    throw ConstructionError("localized seed residual " + std::to_string(seed.residual) + " at level " +
                            std::to_string(j));
  EigenPair out;
  out.bc = bc;
  out.birth_level = j;
  out.localized = seed.descriptor;
  out.lambda = localized_eigenvalue(j);
  out.graph_history = {6.0};
  GraphFunction u = std::move(seed.values);
  for (int m = j; m < M; ++m) {
    const double next = m == j ? 3.0 : decimate_down(out.graph_history.back());
    out.graph_history.push_back(next);
    u = extend_eigenfunction(u, next);
  }
  const double norm = std::sqrt(integrate(GraphFunction{u.level, u.values.cwiseAbs2().cast<std::complex<double>>()}).real());
  u.values /= norm;
  out.values = std::move(u);
  return out;
}

double localized_eigenvalue(int j) { return renormalize_eigenvalue(6.0, j); }

double localized_constant() { return localized_eigenvalue(2) / 25.0; }

EigenBasis::EigenBasis(int level, BoundaryCondition bc, std::vector<EigenMeta> meta, Eigen::MatrixXd functions)
    : level_(level), bc_(bc), meta_(std::move(meta)), functions_(std::move(functions)) {
  const auto& vs = enumerate_vertices(level_);
  if (functions_.rows() != vs.size() || functions_.cols() != static_cast<Eigen::Index>(meta_.size()))
    throw LevelMismatchError("basis shape does not match level " + std::to_string(level_));
  lambdas_.resize(size());
  for (int i = 0; i < size(); ++i) lambdas_[i] = meta_[i].lambda;
  weights_ = Eigen::Map<const Eigen::VectorXd>(vs.weights.data(), vs.size());
}

EigenPair EigenBasis::pair(int i) const {
  const auto& m = meta(i);
  EigenPair p;
  p.lambda = m.lambda;
  p.graph_history = m.graph_history;
  p.birth_level = m.birth_level;
  p.bc = bc_;
  p.values = GraphFunction::from_real(level_, functions_.col(i));
  p.localized = m.localized;
  return p;
}

int EigenBasis::localized_index(int j) const {
  for (int i = 0; i < size(); ++i)
    if (meta_[i].localized && meta_[i].localized->j == j) return i;
  return -1;
}

int infer_birth_level(double graph_eigenvalue, int level, BoundaryCondition bc) {
  const int coarsest = bc == BoundaryCondition::Dirichlet ? 1 : 0;
  double lambda = graph_eigenvalue;
  int m = level;
  while (m > coarsest && !is_forbidden(lambda, 1e-7) && std::abs(lambda) > 1e-12) {
    lambda = decimate_up(lambda);
    --m;
  }
  return m;
}

namespace {

std::vector<double> upward_history(double graph_eigenvalue, int level, int birth) {
  std::vector<double> h(static_cast<std::size_t>(level - birth + 1));
  double lambda = graph_eigenvalue;
  for (int m = level; m >= birth; --m) {
    h[m - birth] = lambda;
    lambda = decimate_up(lambda);
  }
  return h;
}

struct Cluster {
  int begin = 0;
  int end = 0;  // exclusive
  int localized = -1;  // index into the localized list
};

}  // namespace

BasisPtr build_basis(int M, BoundaryCondition bc) {
  const auto& vs = enumerate_vertices(M);
  const auto spec = graph_spectrum(M, bc, GraphMeasure::Quadrature);
  const Eigen::VectorXd weights = Eigen::Map<const Eigen::VectorXd>(vs.weights.data(), vs.size());
  // Omega-orthonormal -> L2(mu)-orthonormal
  const double interior_mass = 2.0 / std::pow(3.0, M + 1);
  const Eigen::MatrixXd raw = spec.vectors / std::sqrt(interior_mass);
  const int count = static_cast<int>(spec.values.size());

  std::vector<Cluster> clusters;
  for (int i = 0; i < count;) {
    int e = i + 1;
    while (e < count && spec.values[e] - spec.values[i] <= kClusterTolerance * std::max(1.0, spec.values[i])) ++e;
    clusters.push_back({i, e, -1});
    i = e;
  }

  std::vector<EigenPair> loc;
  for (int j = 2; j <= M; ++j) loc.push_back(build_localized(j, 0, M, bc));
  for (std::size_t l = 0; l < loc.size(); ++l) {
    const double g = loc[l].graph_eigenvalue();
    auto it = std::find_if(clusters.begin(), clusters.end(), [&](const Cluster& c) {
      return std::abs(spec.values[c.begin] - g) <= 1e-8 * std::max(1.0, g);
    });
    if (it == clusters.end() || it->localized >= 0)
      throw ConstructionError("no eigenspace for localized function born at level " + std::to_string(loc[l].birth_level));
    it->localized = static_cast<int>(l);
  }

  std::vector<EigenMeta> meta;
  meta.reserve(static_cast<std::size_t>(count));
  Eigen::MatrixXd functions(vs.size(), count);
  std::vector<std::pair<double, int>> cluster_order;
  std::vector<int> cluster_start;

  int filled = 0;
  for (std::size_t ci = 0; ci < clusters.size(); ++ci) {
    const auto& c = clusters[ci];
    const int size = c.end - c.begin;
    double value = spec.values.segment(c.begin, size).mean();
    if (std::abs(value) <= 1e-12) value = 0.0;  // constants under Neumann
    const int birth = infer_birth_level(value, M, bc);
    double lambda = renormalize_eigenvalue(value, M);
    std::vector<double> history = upward_history(value, M, birth);

    const int first = filled;
    std::vector<int> candidates(static_cast<std::size_t>(size));
    std::iota(candidates.begin(), candidates.end(), c.begin);
    std::vector<Eigen::Index> dominant(static_cast<std::size_t>(count));
    for (int k : candidates) raw.col(k).cwiseAbs().maxCoeff(&dominant[k]);
    std::stable_sort(candidates.begin(), candidates.end(), [&](int x, int y) {
      return dominant[x] < dominant[y];
    });

    if (c.localized >= 0) {
      const auto& psi = loc[c.localized];
      const Eigen::VectorXd v = psi.values.values.real();
      const Eigen::VectorXd proj =
          raw.middleCols(c.begin, size) * (raw.middleCols(c.begin, size).transpose() * weights.cwiseProduct(v));
      const double off = std::sqrt((v - proj).cwiseAbs2().dot(weights));
      if (off > 1e-8)
        throw ConstructionError("localized function leaves its eigenspace by " + std::to_string(off));
      functions.col(filled) = v;
      lambda = psi.lambda;
      EigenMeta lm{psi.lambda, psi.graph_history, psi.birth_level, psi.localized};
      meta.push_back(std::move(lm));
      ++filled;
    }
    for (int k : candidates) {
      if (filled - first == size) break;
      Eigen::VectorXd v = raw.col(k);
      for (int pass = 0; pass < 2; ++pass) {
        if (filled == first) break;
        const auto q = functions.middleCols(first, filled - first);
        v -= q * (q.transpose() * weights.cwiseProduct(v));
      }
      const double norm = std::sqrt(v.cwiseAbs2().dot(weights));
      if (norm <= 1e-3) continue;  // nearly inside the span already
      v /= norm;
      Eigen::Index at = 0;
      v.cwiseAbs().maxCoeff(&at);
      if (v[at] < 0.0) v = -v;
      functions.col(filled) = v;
      meta.push_back({lambda, history, birth, std::nullopt});
      ++filled;
    }
    if (filled - first != size)
      throw DegeneracyError("eigenspace of dimension " + std::to_string(size) + " lost rank in orthonormalization");
    for (int i = first; i < filled; ++i) meta[i].lambda = lambda;
    cluster_order.push_back({lambda, static_cast<int>(ci)});
    cluster_start.push_back(first);
  }

  std::stable_sort(cluster_order.begin(), cluster_order.end(),
                   [](const auto& x, const auto& y) { return x.first < y.first; });
  std::vector<EigenMeta> sorted_meta;
  sorted_meta.reserve(meta.size());
  Eigen::MatrixXd sorted(vs.size(), count);
  int at = 0;
  for (const auto& [lambda, ci] : cluster_order) {
    const int first = cluster_start[ci];
    const int size = clusters[ci].end - clusters[ci].begin;
    sorted.middleCols(at, size) = functions.middleCols(first, size);
    for (int i = 0; i < size; ++i) sorted_meta.push_back(std::move(meta[first + i]));
    at += size;
  }
  return std::make_shared<const EigenBasis>(M, bc, std::move(sorted_meta), std::move(sorted));
}

double eigen_residual(const EigenPair& pair, int M, bool use_graph_eigenvalue) {
  const auto& u = pair.values;
  if (u.level != M) throw LevelMismatchError("eigenpair sampled on level " + std::to_string(u.level));
  const auto lap = graph_laplacian_apply(u, M, pair.bc, GraphMeasure::Quadrature);
  const double scale = use_graph_eigenvalue ? 1.0 : 1.5 * std::pow(5.0, M);
  const double lambda = use_graph_eigenvalue ? pair.graph_eigenvalue() : pair.lambda;
  Eigen::VectorXcd r = -scale * lap.values - lambda * u.values;
  if (pair.bc == BoundaryCondition::Dirichlet) r.head(3).setZero();
  const auto& w = enumerate_vertices(M).weights;
  const Eigen::Map<const Eigen::VectorXd> wv(w.data(), static_cast<Eigen::Index>(w.size()));
  const double rn = std::sqrt(r.cwiseAbs2().dot(wv));
  if (lambda == 0.0) return rn;
  const double un = std::sqrt(u.values.cwiseAbs2().dot(wv));
  return rn / (lambda * un);
}

}  // namespace sgnls
