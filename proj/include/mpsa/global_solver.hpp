#pragma once

#include "mpsa/local_assembly.hpp"

#include <Eigen/SparseCore>

#include <string>
#include <vector>

namespace mpsa {

/// All local solutions of a mesh for one formulation.
struct Discretization {
  const Mesh* mesh = nullptr;
  MaterialField material;
  Formulation form;
  std::vector<LocalSolution> locals;  // indexed by vertex

  int ncomp() const { return form.ncomp(); }
};

/// Solves every vertex problem. With threads > 1 vertices are split into
/// contiguous blocks; the result and the reported error (lowest vertex first)
/// do not depend on the thread count.
Discretization discretize(const Mesh& mesh, const MaterialField& material, const Formulation& form, int threads = 1);

struct GlobalSystem {
  Eigen::SparseMatrix<double> A;
  Eigen::VectorXd b;
  Eigen::VectorXd body_force;       // subcell-midpoint integral of f per cell
  std::vector<Eigen::VectorXd> data;  // boundary slot data per vertex
  int ncomp = 2;
  bool pure_neumann = false;
  bool galerkin = false;            // assembled from the symmetric finite difference form
};

/// Assembles A u = b. For the finite volume pairing row K states
/// -sum_sigma T_K^sigma = int_K f. For the gradient pairing the Galerkin form
/// sum_s (Pu v)^T K_s (Pu u + Pd d) is used.
GlobalSystem assemble(const Discretization& disc, const ProblemData& problem);

enum class SolverMethod { Auto, Direct, CG, BiCGSTAB };

SolverMethod parse_solver_method(const std::string& name);
std::string to_string(SolverMethod method);

struct SolverOptions {
  SolverMethod method = SolverMethod::Auto;
  double tol = 1e-12;
  int max_iter = 10000;
  double compat_tol = 1e-8;   // pure Neumann: relative translational compatibility tolerance
  int direct_limit = 40000;   // Auto switches to BiCGSTAB above this many unknowns
};

struct SolveResult {
  CellField u;
  std::string method;
  int iterations = 0;
  double residual = 0.0;             // ||A u - b|| / ||b|| (absolute when b = 0)
  bool nullspace_projected = false;
  double nullspace_correction = 0.0; // ||R lambda||, the load absorbed by the rigid-motion multipliers
};

SolveResult solve(const GlobalSystem& sys, const Mesh& mesh, const SolverOptions& options = {});

/// Rigid motions sampled at cell centers (2 translations and a rotation about
/// the mesh centroid; a constant for one component), orthonormalized in the
/// area-weighted inner product when `orthonormal` is set.
Eigen::MatrixXd rigid_basis(const Mesh& mesh, int ncomp, bool orthonormal = false);

/// max |A - A^T| / max |A|.
double symmetry_defect(const Eigen::SparseMatrix<double>& a);

/// Subcell gradients at vertex s, stacked as in LocalSolution::grad_index.
Eigen::VectorXd local_gradients(const Discretization& disc, const GlobalSystem& sys, const CellField& u, int s);

struct SubfaceTraction {
  int vertex = -1;
  int face = -1;
  int cell = -1;
  Values t;
};

struct TractionTable {
  std::vector<SubfaceTraction> subfaces;
  /// Face totals T_K^sigma; face_totals[f][i] belongs to mesh.face(f).cells[i].
  std::vector<std::array<Values, 2>> face_totals;
};

/// Subface and face tractions of a solved state. Neumann subfaces report the
/// prescribed traction.
TractionTable recover_tractions(const Discretization& disc, const GlobalSystem& sys, const CellField& u);

/// Per-cell |sum_sigma T_K^sigma + int_K f| / (sum_sigma |T_K^sigma| + |int_K f|).
std::vector<double> force_balance_residual(const Mesh& mesh, const TractionTable& tractions, const GlobalSystem& sys);

void write_solution_csv(const std::string& path, const Mesh& mesh, const CellField& u);
void write_traction_csv(const std::string& path, const Mesh& mesh, const TractionTable& tractions);

}  // namespace mpsa
