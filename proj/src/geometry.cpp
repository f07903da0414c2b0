#include "sgnls/geometry.hpp"

#include "sgnls/errors.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <memory>
#include <mutex>
#include <set>

namespace sgnls {

double hausdorff_dimension() { return std::log(3.0) / std::log(2.0); }
double walk_dimension() { return std::log(5.0) / std::log(2.0); }
double spectral_dimension() { return std::log(9.0) / std::log(5.0); }
double embedding_threshold() { return std::log(3.0) / std::log(5.0); }

CellAddress::CellAddress(std::initializer_list<int> letters) {
  letters_.reserve(letters.size());
  for (int a : letters) {
    if (a < 0 || a > 2) throw DomainError("cell address letter out of range");
    letters_.push_back(static_cast<std::uint8_t>(a));
  }
}

CellAddress::CellAddress(std::string_view letters) {
  letters_.reserve(letters.size());
  for (char c : letters) {
    if (c < '0' || c > '2') throw DomainError("cell address letter out of range");
    letters_.push_back(static_cast<std::uint8_t>(c - '0'));
  }
}

CellAddress CellAddress::child(int letter) const {
  if (letter < 0 || letter > 2) throw DomainError("cell address letter out of range");
  CellAddress out = *this;
  out.letters_.push_back(static_cast<std::uint8_t>(letter));
  return out;
}

std::int64_t CellAddress::index() const {
  std::int64_t r = 0;
  for (auto a : letters_) r = 3 * r + a;
  return r;
}

std::string CellAddress::str() const {
  std::string s;
  for (auto a : letters_) s.push_back(static_cast<char>('0' + a));
  return s;
}

CellAddress cell_address_from_index(std::int64_t index, int level) {
  std::string s(static_cast<std::size_t>(level), '0');
  for (int i = level - 1; i >= 0; --i) {
    s[i] = static_cast<char>('0' + index % 3);
    index /= 3;
  }
  return CellAddress(s);
}

std::int64_t vertex_count(int m) {
  std::int64_t p = 1;
  for (int i = 0; i <= m; ++i) p *= 3;
  return (p + 3) / 2;
}

std::int64_t interior_count(int m) { return vertex_count(m) - 3; }

Eigen::Vector2d VertexSet::coordinates(int id) const {
  const auto& p = points[id];
  const double scale = std::ldexp(1.0, -level);
  return {(static_cast<double>(p.u) + 0.5 * static_cast<double>(p.v)) * scale,
          0.5 * std::sqrt(3.0) * static_cast<double>(p.v) * scale};
}

int VertexSet::find(const LatticePoint& p) const {
  auto it = lookup.find(p);
  return it == lookup.end() ? -1 : it->second;
}

const std::array<int, 3>& VertexSet::cell(const CellAddress& w) const {
  if (w.size() != level) throw LevelMismatchError("cell address length differs from vertex set level");
  return cells[w.index()];
}

namespace {

VertexSet base_level() {
  VertexSet vs;
  vs.level = 0;
  vs.points = {{0, 0}, {1, 0}, {0, 1}};
  vs.birth_level = {0, 0, 0};
  vs.cells = {{0, 1, 2}};
  return vs;
}

void finish(VertexSet& vs) {
  const auto n = vs.points.size();
  vs.lookup.clear();
  for (std::size_t i = 0; i < n; ++i) vs.lookup.emplace(vs.points[i], static_cast<int>(i));

  std::vector<std::set<int>> nb(n);
  vs.incident_cells.assign(n, {});
  for (std::size_t c = 0; c < vs.cells.size(); ++c) {
    const auto& t = vs.cells[c];
    for (int a = 0; a < 3; ++a) {
      vs.incident_cells[static_cast<std::size_t>(t[a])].push_back(static_cast<int>(c));
      for (int b = 0; b < 3; ++b)
        if (a != b) nb[static_cast<std::size_t>(t[a])].insert(t[b]);
    }
  }
  vs.neighbors.assign(n, {});
  for (std::size_t i = 0; i < n; ++i) vs.neighbors[i].assign(nb[i].begin(), nb[i].end());

  const double denom = 3.0 * std::pow(3.0, vs.level);
  vs.weights.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    vs.weights[i] = static_cast<double>(vs.incident_cells[i].size()) / denom;
}

// Children of cell w are w0, w1, w2 with corners (c_i + c_j)/2; new vertices
// are appended sorted by (v, 2u+v), i.e. lexicographic on (y, x).
VertexSet refine(const VertexSet& prev) {
  VertexSet next;
  next.level = prev.level + 1;
  next.points.reserve(static_cast<std::size_t>(vertex_count(next.level)));
  for (const auto& p : prev.points) next.points.push_back({2 * p.u, 2 * p.v});
  next.birth_level = prev.birth_level;

  std::map<LatticePoint, int> index;
  for (std::size_t i = 0; i < next.points.size(); ++i) index.emplace(next.points[i], static_cast<int>(i));

  std::vector<std::array<LatticePoint, 3>> child_corners;
  child_corners.reserve(prev.cells.size() * 3);
  std::set<std::pair<std::pair<std::int64_t, std::int64_t>, LatticePoint>> fresh;
  for (const auto& c : prev.cells) {
    std::array<LatticePoint, 3> corner;
    for (int a = 0; a < 3; ++a) corner[a] = next.points[static_cast<std::size_t>(c[a])];
    for (int i = 0; i < 3; ++i) {
      std::array<LatticePoint, 3> ch;
      for (int j = 0; j < 3; ++j) {
        const auto& ci = corner[i];
        const auto& cj = corner[j];
        LatticePoint q{(ci.u + cj.u) / 2, (ci.v + cj.v) / 2};
        ch[j] = q;
        if (!index.contains(q)) fresh.insert({{q.v, 2 * q.u + q.v}, q});
      }
      child_corners.push_back(ch);
    }
  }
  for (const auto& [key, q] : fresh) {
    index.emplace(q, static_cast<int>(next.points.size()));
    next.points.push_back(q);
    next.birth_level.push_back(next.level);
  }
  next.cells.reserve(child_corners.size());
  for (const auto& ch : child_corners)
    next.cells.push_back({index.at(ch[0]), index.at(ch[1]), index.at(ch[2])});
  finish(next);
  return next;
}

struct SharedLevels {
  std::mutex mu;
  std::deque<std::unique_ptr<VertexSet>> levels;
};

SharedLevels& shared_levels() {
  static SharedLevels s;
  return s;
}

}  // namespace

const VertexSet& enumerate_vertices(int m, int max_level) {
  if (m < 0) throw DomainError("negative level");
  if (m > max_level)
    throw CapacityError("level " + std::to_string(m) + " exceeds maximum " + std::to_string(max_level));
  auto& s = shared_levels();
  std::lock_guard lock(s.mu);
  if (s.levels.empty()) {
    auto v = std::make_unique<VertexSet>(base_level());
    finish(*v);
    s.levels.push_back(std::move(v));
  }
  while (static_cast<int>(s.levels.size()) <= m)
    s.levels.push_back(std::make_unique<VertexSet>(refine(*s.levels.back())));
  return *s.levels[m];
}

std::vector<Junction> junction_points(int m) {
  if (m < 1) throw DomainError("level 0 has no junction points");
  const auto& vs = enumerate_vertices(m);
  std::vector<Junction> out;
  out.reserve(static_cast<std::size_t>(vs.size() - 3));
  for (int id = 3; id < vs.size(); ++id) {
    const auto& inc = vs.incident_cells[id];
    if (inc.size() != 2) throw ConstructionError("junction without exactly two incident cells");
    out.push_back({id, cell_address_from_index(inc[0], m), cell_address_from_index(inc[1], m)});
  }
  return out;
}

double cell_measure(const CellAddress& w) { return std::pow(3.0, -w.size()); }

GraphFunction GraphFunction::zeros(int level) {
  return {level, Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(vertex_count(level)))};
}

GraphFunction GraphFunction::constant(int level, std::complex<double> c) {
  return {level, Eigen::VectorXcd::Constant(static_cast<Eigen::Index>(vertex_count(level)), c)};
}

GraphFunction GraphFunction::from_real(int level, const Eigen::VectorXd& v) {
  if (v.size() != vertex_count(level)) throw LevelMismatchError("vector length does not match level");
  return {level, v.cast<std::complex<double>>()};
}

std::complex<double> integrate(const GraphFunction& f) { return integrate(f, f.level); }

std::complex<double> integrate(const GraphFunction& f, int quadrature_level) {
  if (f.level != quadrature_level || f.size() != vertex_count(quadrature_level))
    throw LevelMismatchError("function level " + std::to_string(f.level) + " vs quadrature level " +
                             std::to_string(quadrature_level));
  const auto& vs = enumerate_vertices(quadrature_level);
  // integer corner counts first, one division at the end
  std::complex<double> sum = 0.0;
  for (Eigen::Index i = 0; i < f.values.size(); ++i)
    sum += static_cast<double>(vs.incident_cells[i].size()) * f.values[i];
  return sum / (3.0 * std::pow(3.0, quadrature_level));
}

double support_measure(const GraphFunction& f, double threshold) {
  const auto& vs = enumerate_vertices(f.level);
  if (f.size() != vs.size()) throw LevelMismatchError("function length does not match level");
  const double peak = f.size() ? f.values.cwiseAbs().maxCoeff() : 0.0;
  if (peak == 0.0) return 0.0;
  if (threshold < 0.0) threshold = 1e-12 * peak;
  std::int64_t hit = 0;
  for (const auto& c : vs.cells) {
    for (int id : c) {
      if (std::abs(f.values[id]) > threshold) {
        ++hit;
        break;
      }
    }
  }
  return static_cast<double>(hit) * std::pow(3.0, -vs.level);
}

}  // namespace sgnls
