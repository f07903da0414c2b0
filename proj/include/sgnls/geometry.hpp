#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sgnls {

inline constexpr int kDefaultMaxLevel = 8;

// Dimensions of the gasket under the standard self-similar energy.
double hausdorff_dimension();
double walk_dimension();
double spectral_dimension();
// Sobolev index above which functions are bounded.
double embedding_threshold();

/// Word over {0,1,2}; the empty word is the whole gasket.
class CellAddress {
 public:
  CellAddress() = default;
  CellAddress(std::initializer_list<int> letters);
  explicit CellAddress(std::string_view letters);

  int size() const { return static_cast<int>(letters_.size()); }
  bool empty() const { return letters_.empty(); }
  int operator[](int i) const { return letters_[i]; }

  CellAddress child(int letter) const;
  // Base-3 reading of the word; indexes VertexSet::cells at level size().
  std::int64_t index() const;
  std::string str() const;

  friend bool operator==(const CellAddress&, const CellAddress&) = default;
  friend auto operator<=>(const CellAddress&, const CellAddress&) = default;

 private:
  std::vector<std::uint8_t> letters_;
};

CellAddress cell_address_from_index(std::int64_t index, int level);

// Lattice numerators in the basis e1=(1,0), e2=(1/2,sqrt(3)/2); the
// denominator is 2^level of the owning VertexSet.
struct LatticePoint {
  std::int64_t u = 0;
  std::int64_t v = 0;
  friend bool operator==(const LatticePoint&, const LatticePoint&) = default;
  friend auto operator<=>(const LatticePoint&, const LatticePoint&) = default;
};

struct VertexSet {
  int level = 0;
  std::vector<LatticePoint> points;
  std::vector<int> birth_level;
  std::vector<std::vector<int>> neighbors;
  // cells[w.index()] = {F_w(p0), F_w(p1), F_w(p2)} for |w| = level
  std::vector<std::array<int, 3>> cells;
  std::vector<std::vector<int>> incident_cells;
  std::array<int, 3> boundary_ids{0, 1, 2};
  // Corner-average quadrature: (#incident cells) / (3 * 3^level).
  std::vector<double> weights;

  int size() const { return static_cast<int>(points.size()); }
  bool is_boundary(int id) const { return id < 3; }
  int degree(int id) const { return static_cast<int>(neighbors[id].size()); }
  Eigen::Vector2d coordinates(int id) const;
  // -1 when absent.
  int find(const LatticePoint& p) const;
  const std::array<int, 3>& cell(const CellAddress& w) const;

  std::map<LatticePoint, int> lookup;
};

/// Vertex count of level m, (3^(m+1)+3)/2.
std::int64_t vertex_count(int m);
/// Interior vertex count, (3^(m+1)-3)/2.
std::int64_t interior_count(int m);

// Built once per process and shared; levels above max_level throw CapacityError.
const VertexSet& enumerate_vertices(int m, int max_level = kDefaultMaxLevel);

struct Junction {
  int vertex = -1;
  CellAddress first;
  CellAddress second;
};

// Vertices of V_m minus V_0 with the two level-m cells meeting there.
std::vector<Junction> junction_points(int m);

double cell_measure(const CellAddress& w);

struct GraphFunction {
  int level = 0;
  Eigen::VectorXcd values;

  static GraphFunction zeros(int level);
  static GraphFunction constant(int level, std::complex<double> c);
  static GraphFunction from_real(int level, const Eigen::VectorXd& v);
  int size() const { return static_cast<int>(values.size()); }
};

std::complex<double> integrate(const GraphFunction& f);
// Throws LevelMismatchError when f does not live on the requested level.
std::complex<double> integrate(const GraphFunction& f, int quadrature_level);

// Negative threshold selects 1e-12 * max|f|.
double support_measure(const GraphFunction& f, double threshold = -1.0);

}  // namespace sgnls
