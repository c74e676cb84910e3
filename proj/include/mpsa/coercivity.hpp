#pragma once

#include "mpsa/global_solver.hpp"

#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace mpsa {

/// Audit threshold: theta2 and theta2' at or below this value fail.
inline constexpr double kAuditTolerance = 1e-10;

struct VertexAudit {
  int vertex = -1;
  /// Min eigenvalue of the pencil (sym b(u, Pi_C u), energy + scaled jumps) on
  /// Pi_FV,s H_T modulo rigid motions. +inf when the quotient is empty.
  double theta2 = std::numeric_limits<double>::infinity();
  bool empty_quotient = false;
  /// Min of energy / scaled jump norm; +inf when no jump direction exists.
  double theta2_prime = std::numeric_limits<double>::infinity();
  /// Largest scaled jump norm relative to the full B norm (0 means jump-free).
  double jump_ratio = 0.0;
  /// |Pi_FV,s u|_{D,s} <= theta1 |u|_{T,s}; +inf if the D norm sees a T-null direction.
  double theta1 = 0.0;
  bool vertex_symmetric = false;
  double s_eig_min = 0.0;   // min over the subcells of the smaller eigenvalue of S + S^T
  bool singular = false;    // local KKT had a benign kernel

  bool failed() const { return theta2 <= kAuditTolerance || theta2_prime <= kAuditTolerance; }
  bool uncontrolled_jump() const { return theta2_prime <= kAuditTolerance; }
};

struct GlobalCoercivity {
  std::optional<double> theta;   // min eigenvalue of sym(A) against the |.|_T Gram matrix
  std::string status;            // "ok", or why the estimate is unavailable
};

struct CountingCheck {
  std::vector<bool> underconstrained;  // per macrocell: d card(T_k) > card(V_k)
  std::vector<int> cells;              // card(T_k)
  std::vector<int> vertices;           // card(V_k)
  bool all = false;
  int card_vertices = 0;
  int card_cells = 0;
  int d = 2;
};

struct CoercivityReport {
  std::vector<VertexAudit> vertices;
  double theta2 = std::numeric_limits<double>::infinity();        // min over finite vertex values
  double theta1 = 0.0;                                             // max
  double theta2_prime = std::numeric_limits<double>::infinity();  // min
  GlobalCoercivity global;
  int card_vertices = 0;
  int card_cells = 0;
  int d = 2;
  std::optional<CountingCheck> counting;

  bool passed() const;
  std::vector<int> failed_vertices() const;
  std::string to_json() const;
};

/// Local checks at one vertex from its solved local problem.
VertexAudit audit_vertex(const LocalSolution& local, const MaterialField& material);

/// Rigid motions of the region sampled at the cell centers (columns; rotation about x_s).
Eigen::MatrixXd local_rigid_basis(const InteractionRegion& r, int ncomp);

/// Global estimate Theta. Skipped (status set) above max_unknowns.
GlobalCoercivity estimate_global_coercivity(const Discretization& disc, int max_unknowns = 3000);

/// |u|_T^2 Gram matrix of the mesh (ncomp copies, cell-major layout).
Eigen::MatrixXd t_gram_matrix(const Mesh& mesh, int ncomp);

/// Cells binned by centroid into an nbx x nby grid over the mesh bounding box.
std::vector<int> block_partition(const Mesh& mesh, int nbx, int nby);

/// Macrocell counting check. Throws ConfigError if the partition misses a
/// cell or a macrocell exceeds max_cells.
CountingCheck check_locally_underconstrained(const Mesh& mesh, const std::vector<int>& partition, int d = 2,
                                             int max_cells = 64);

/// Partition file: one macrocell index per line, one line per cell.
std::vector<int> load_partition(const std::string& path, int num_cells);

struct AuditOptions {
  bool global = true;
  int global_max_unknowns = 3000;
  int threads = 1;
};

CoercivityReport audit(const Discretization& disc, const AuditOptions& options = {});

}  // namespace mpsa
