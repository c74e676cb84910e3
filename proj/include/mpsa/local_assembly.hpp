#pragma once

#include "mpsa/geometry.hpp"
#include "mpsa/material.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mpsa {

/// Constitutive law used by the discrete bilinear form.
enum class Law {
  Hooke,              // 2 mu sym(G) + lambda tr(G) I
  DirichletCoercive,  // mu G + (lambda + mu) tr(G) I
  Scalar,             // kappa G, one component; kappa is read from mu
};

/// How the local constraints pair the stress with face test values.
enum class Pairing {
  Traction,  // m_sigma^s sigma n_{K,sigma}: the finite volume form
  Gradient,  // m_K^s sigma g_{K,sigma}^s: the symmetric finite difference form
};

struct Formulation {
  Law law = Law::Hooke;
  Pairing pairing = Pairing::Traction;
  QuadratureRule rule;
  std::optional<double> alpha;  // constant stabilization weight; default is the harmonic mean

  int ncomp() const { return law == Law::Scalar ? 1 : 2; }
};

/// The law as a matrix acting on the row-major flattened gradient (index c*2 + j).
Eigen::MatrixXd stress_operator(Law law, double mu, double lambda);

/// Boundary data entering a local problem: one Dirichlet value per continuity
/// point, or one integrated traction per Neumann subface.
struct DataSlot {
  enum class Kind { Dirichlet, Neumann };
  Kind kind = Kind::Dirichlet;
  int face = -1;   // region-local subface
  int point = 0;   // continuity point (Dirichlet only)
  int cell = -1;   // region-local owner cell
  int side = 0;
};

/// Condensed local problem at a vertex.
///
/// With u the stacked cell values of the region (cell-major) and d the stacked
/// slot data, the subcell gradients are Pu u + Pd d and the subface tractions
/// T_{K,s}^sigma = m_sigma^s sigma(G_K) n_{K,sigma} are Tu u + Td d.
/// Gradient rows are indexed by grad_index, traction rows by traction_row.
struct LocalSolution {
  InteractionRegion region;
  Formulation form;
  int ncomp = 2;
  std::vector<double> alpha;             // per region subface
  std::vector<DataSlot> slots;
  std::vector<Eigen::MatrixXd> stress;   // per region cell, stress_operator of the cell
  Eigen::MatrixXd Pu, Pd;
  Eigen::MatrixXd Tu, Td;
  Eigen::MatrixXd Su;                    // paired tractions (pseudo-tractions for Gradient pairing) w.r.t. u
  bool singular = false;                 // the KKT system had a traction-free kernel

  int num_unknowns() const { return region.num_cells() * ncomp; }
  int num_data() const { return static_cast<int>(slots.size()) * ncomp; }
  int grad_index(int cell, int comp, int dir) const { return (cell * ncomp + comp) * 2 + dir; }
  int traction_row(int cell, int side) const { return (cell * 2 + side) * ncomp; }

  /// Stacked cell values of the region.
  Eigen::VectorXd gather(const Eigen::VectorXd& cell_values) const;
  /// Evaluates the slot data; Neumann tractions are integrated with 2-point Gauss.
  Eigen::VectorXd data(const ProblemData& problem) const;
  /// Gradient of region cell i (ncomp x 2) from the stacked gradient vector.
  Eigen::MatrixXd gradient(const Eigen::VectorXd& g, int cell) const;
  /// Subface values u_K + G_K (x_beta - x_K) at the continuity points of (cell, side).
  Eigen::MatrixXd face_values(const Eigen::VectorXd& u, const Eigen::VectorXd& g, int cell, int side) const;
};

/// Solves the local constrained minimization at vertex s for every unit cell
/// value and data slot. Throws IllPosedError if the KKT kernel changes the
/// tractions, ConfigError on an untagged boundary face.
LocalSolution solve_local(const Mesh& mesh, const MaterialField& material, const Formulation& form, int s);

/// Stabilization weight of a region subface.
double stabilization_weight(const InteractionRegion& r, const RegionFace& f, const MaterialField& material,
                            const Formulation& form);

/// Per-vertex matrices as a JSON document (debug output).
std::string local_debug_json(const LocalSolution& local);

}  // namespace mpsa
