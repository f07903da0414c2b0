#pragma once

#include "sgnls/geometry.hpp"

#include <Eigen/Dense>

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sgnls {

enum class BoundaryCondition { Dirichlet, Neumann };

std::string to_string(BoundaryCondition bc);
BoundaryCondition parse_boundary_condition(std::string_view text);

// Counting: every vertex carries mass 1. Quadrature: vertices carry the
// corner-average quadrature mass, so boundary rows are doubled. The two agree
// on Dirichlet problems.
enum class GraphMeasure { Counting, Quadrature };

/// Half sum of squared edge differences over V_m; u may live on a finer level.
/// With renormalized=true returns (5/3)^m E_m(u).
double graph_energy(const GraphFunction& u, int m, bool renormalized = false);

/// Returns Delta_m u (sum over neighbours of u(y)-u(x)) on V_m. Dirichlet
/// clamps the boundary to zero and returns zeros there.
GraphFunction graph_laplacian_apply(const GraphFunction& u, int m, BoundaryCondition bc,
                                    GraphMeasure measure = GraphMeasure::Counting);

struct GraphSpectrum {
  int level = 0;
  BoundaryCondition bc = BoundaryCondition::Dirichlet;
  GraphMeasure measure = GraphMeasure::Counting;
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // one column per value, full vertex length
};

// Eigenvectors are orthonormal in the inner product of `measure` and signed so
// that their largest-modulus entry is positive.
GraphSpectrum graph_spectrum(int m, BoundaryCondition bc, GraphMeasure measure = GraphMeasure::Counting);

inline constexpr double kForbiddenValues[3] = {2.0, 5.0, 6.0};

bool is_forbidden(double lambda, double tol = 1e-10);
/// Root of lambda = x(5-x) below 5/2.
double decimate_down(double lambda);
/// Root of lambda = x(5-x) above 5/2.
double decimate_plus(double lambda);
/// x(5-x): the coarser-level eigenvalue.
double decimate_up(double lambda);

// (3/2) lim 5^n lambda_n along the minus branch starting at birth_level. A
// birth value of 6 takes the step 6 -> 3 first since 2 blocks extension.
double renormalize_eigenvalue(double lambda_birth, int birth_level);

/// Extends a level-m eigenfunction to level m+1 for the given next-level
/// eigenvalue.
GraphFunction extend_eigenfunction(const GraphFunction& u, double lambda_next);

struct LocalizedDescriptor {
  int j = 0;
  int junction = 0;  // 0,1,2 -> midpoint of (p0,p1), (p0,p2), (p1,p2)
  CellAddress first;
  CellAddress second;
  friend bool operator==(const LocalizedDescriptor&, const LocalizedDescriptor&) = default;
};

struct LocalizedSeed {
  GraphFunction values;  // level j
  double residual = 0.0;  // max |(-Delta_j - 6) seed|
  int junction_vertex = -1;
  LocalizedDescriptor descriptor;
};

LocalizedSeed build_localized_seed(int j, int junction = 0);

struct EigenPair {
  double lambda = 0.0;
  std::vector<double> graph_history;  // from birth level up to the sampling level
  int birth_level = 0;
  BoundaryCondition bc = BoundaryCondition::Dirichlet;
  GraphFunction values;
  std::optional<LocalizedDescriptor> localized;

  double graph_eigenvalue() const { return graph_history.back(); }
};

EigenPair build_localized(int j, int junction, int M, BoundaryCondition bc = BoundaryCondition::Dirichlet);

/// Continuum eigenvalue of the localized function born at level j.
double localized_eigenvalue(int j);
/// Lambda(psi_j) = c6 * 5^j.
double localized_constant();

struct EigenMeta {
  double lambda = 0.0;
  std::vector<double> graph_history;
  int birth_level = 0;
  std::optional<LocalizedDescriptor> localized;
};

class EigenBasis {
 public:
  EigenBasis(int level, BoundaryCondition bc, std::vector<EigenMeta> meta, Eigen::MatrixXd functions);

  int level() const { return level_; }
  BoundaryCondition bc() const { return bc_; }
  int size() const { return static_cast<int>(meta_.size()); }
  int vertices() const { return static_cast<int>(functions_.rows()); }

  double lambda(int i) const { return meta_[i].lambda; }
  const Eigen::VectorXd& lambdas() const { return lambdas_; }
  const EigenMeta& meta(int i) const { return meta_[i]; }
  const std::vector<EigenMeta>& meta() const { return meta_; }
  // Real eigenfunctions, one column each, sampled on V_level.
  const Eigen::MatrixXd& functions() const { return functions_; }
  const Eigen::VectorXd& weights() const { return weights_; }

  EigenPair pair(int i) const;
  // Index of the localized member born at level j, or -1.
  int localized_index(int j) const;

 private:
  int level_;
  BoundaryCondition bc_;
  std::vector<EigenMeta> meta_;
  Eigen::MatrixXd functions_;
  Eigen::VectorXd lambdas_;
  Eigen::VectorXd weights_;
};

using BasisPtr = std::shared_ptr<const EigenBasis>;

inline constexpr double kClusterTolerance = 1e-9;

BasisPtr build_basis(int M, BoundaryCondition bc);

// Level of first appearance found by walking x -> x(5-x) upward until a
// forbidden value or the coarsest level is met.
int infer_birth_level(double graph_eigenvalue, int level, BoundaryCondition bc);

/// ||(3/2)5^M(-Delta_M)u - Lambda u|| / (Lambda ||u||) in L2(mu); absolute when
/// Lambda = 0. use_graph_eigenvalue substitutes the pair's level-M graph value.
double eigen_residual(const EigenPair& pair, int M, bool use_graph_eigenvalue = false);

}  // namespace sgnls
