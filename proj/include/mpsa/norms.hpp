#pragma once

#include "mpsa/global_solver.hpp"

#include <functional>
#include <vector>

namespace mpsa {

/// Geometry of every interaction region of a mesh, indexed by vertex.
std::vector<InteractionRegion> build_regions(const Mesh& mesh, const QuadratureRule& rule = QuadratureRule::full());

/// Discontinuous field: cell values plus subface point values u_{K,s}^{sigma,beta}.
/// points[s][lf] is ncomp x (2 * npoints); column side * npoints + beta belongs
/// to region face lf's cell `cells[side]`. Values on Dirichlet subfaces are
/// treated as zero by every norm.
struct DField {
  int ncomp = 2;
  Eigen::VectorXd cells;
  std::vector<std::vector<Eigen::MatrixXd>> points;
};

/// Continuous field: cell values plus one value u_s^sigma per subface.
struct CField {
  int ncomp = 2;
  Eigen::VectorXd cells;
  std::vector<std::vector<Eigen::VectorXd>> faces;  // [s][lf]
};

DField zero_dfield(const std::vector<InteractionRegion>& regions, int num_cells, int ncomp);
CField zero_cfield(const std::vector<InteractionRegion>& regions, int num_cells, int ncomp);

/// Pi_D: every point of a subface takes the subface value.
DField project_d(const std::vector<InteractionRegion>& regions, const CField& u);
/// Pi_C: subface value is the two-sided average <u>_s^sigma (one-sided on the boundary).
CField project_c(const std::vector<InteractionRegion>& regions, const DField& u);
/// Pi_T: the cell values.
CellField project_t(const DField& u);
CellField project_t(const CField& u);

/// |u|_T from the face formula.
double seminorm_t(const Mesh& mesh, const CellField& u);
/// |u|_{T,s}^2, summing over F_s cap F_K.
double seminorm_t_local_sq(const InteractionRegion& r, const CellField& u);
double seminorm_d_local_sq(const InteractionRegion& r, const DField& u, int s);
double seminorm_d(const std::vector<InteractionRegion>& regions, const DField& u);
double seminorm_c(const std::vector<InteractionRegion>& regions, const CField& u);

/// Pi_FV u: the cell values and the point values of the local reconstructions.
DField fv_projection(const Discretization& disc, const GlobalSystem& sys, const CellField& u);

/// Exact solution for error measurement.
struct ExactField {
  int ncomp = 2;
  std::function<Values(const Vec2&)> value;
  std::function<Eigen::MatrixXd(const Vec2&)> gradient;  // ncomp x 2
};

struct ErrorNorms {
  double l2_u = 0.0;      // ||Pi_L2 u - u||_L2
  double t_u = 0.0;       // |u_T - Pi_T u|_T
  double stress = 0.0;    // ||sigma(grad_bar u) - sigma(grad u)||_L2 (flux for one component)
  double max_div = 0.0;   // max over subcells of |tr grad_bar u|
};

/// Errors of a solved state against an exact field, integrated with a
/// 7-point rule on the two triangles of every subcell.
ErrorNorms measure_errors(const Discretization& disc, const GlobalSystem& sys, const CellField& u,
                          const ExactField& exact);

/// Degree-5 7-point triangle rule on (a, b, c); weights sum to the area.
void triangle_rule(const Vec2& a, const Vec2& b, const Vec2& c, std::array<Vec2, 7>& points,
                   std::array<double, 7>& weights);

}  // namespace mpsa
