#pragma once

#include "mpsa/mesh.hpp"

#include <array>
#include <vector>

namespace mpsa {

/// Continuity points on a subface. The full rule is 2-point Gauss-Legendre on
/// the segment [x_s, face midpoint]; the reduced rule is a single point at
/// x_s + eta (x_v - x_s) carrying the whole subface length.
struct QuadratureRule {
  bool reduced = false;
  double eta = 1.0 / 3.0;

  static QuadratureRule full() { return {}; }
  static QuadratureRule reduced_at(double eta) { return {true, eta}; }
  int num_points() const { return reduced ? 1 : 2; }
};

/// 2-point Gauss-Legendre rule on the segment [a, b].
void gauss2(const Vec2& a, const Vec2& b, std::array<Vec2, 2>& points, std::array<double, 2>& weights);

/// Subface (s, sigma) of an interaction region.
struct RegionFace {
  int face = -1;
  int other_vertex = -1;              // x_v, the far end of sigma
  BoundaryTag tag = BoundaryTag::Interior;
  std::array<int, 2> cells{-1, -1};   // region-local cell indices, ascending; [1] = -1 on the boundary
  std::array<int, 2> sides{-1, -1};   // which of the cell's two subfaces this is (0 or 1)
  double length = 0.0;                // m_sigma^s
  double face_length = 0.0;           // m_sigma
  Vec2 midpoint;                      // midpoint of the subface segment
  std::vector<Vec2> points;           // continuity points x_beta
  std::vector<double> weights;        // omega_beta, summing to m_sigma^s
  Vec2 mean;                          // sum_beta omega_beta x_beta / m_sigma^s

  bool is_boundary() const { return cells[1] < 0; }
};

/// Subcell (K, s) of an interaction region.
struct RegionCell {
  int cell = -1;
  Vec2 center;
  double area = 0.0;                  // m_K^s
  double cell_diameter = 0.0;
  std::array<int, 2> faces{-1, -1};   // region-local subfaces: edge entering s, edge leaving s (CCW)
  std::array<Vec2, 2> normals;        // unit outward n_{K,sigma}
  std::array<double, 2> distances{};  // d_{K,sigma}
  Mat2 g;                             // row i holds g_{K,sigma_i}^s
  std::array<Vec2, 4> corners;        // x_K, face midpoint, x_s, face midpoint
};

/// Per-vertex view of the mesh with all subcell/subface geometry.
struct InteractionRegion {
  int vertex = -1;
  Vec2 x;
  std::vector<RegionCell> cells;      // ascending global cell index
  std::vector<RegionFace> faces;      // ascending global face index

  int num_cells() const { return static_cast<int>(cells.size()); }
  int num_faces() const { return static_cast<int>(faces.size()); }
  int num_interior_faces() const;
  /// Region-local index of global cell k, or -1.
  int local_cell(int k) const;
  /// Largest distance from x_s to a cell center of the region.
  double length_scale() const;
};

/// Builds the interaction region of vertex s. Throws MeshError on a
/// degenerate subcell or a singular g-vector system.
InteractionRegion build_region(const Mesh& mesh, int s, const QuadratureRule& rule = QuadratureRule::full());

/// Area of subcell (K, s) (the quadrilateral x_K, face midpoints, x_s).
double subcell_area(const Mesh& mesh, int k, int s);

/// Consistent gradient from subface averages <u>_{K,s}^sigma; rows are components.
Eigen::MatrixXd consistent_gradient(const RegionCell& c, const Eigen::MatrixXd& face_avg, const Values& u_k);
/// Finite volume gradient (1/m_K^s) sum m_sigma^s (<u> - u_K) (x) n.
Eigen::MatrixXd fv_gradient(const InteractionRegion& r, const RegionCell& c, const Eigen::MatrixXd& face_avg,
                            const Values& u_k);

/// S = sum_sigma m_sigma^s (<x>_sigma - x_K) (x) n_{K,sigma} for a subcell.
Mat2 s_matrix(const InteractionRegion& r, const RegionCell& c);

/// Reflection test of the subcell corners about the line (x_K, x_s).
bool is_vertex_symmetric(const InteractionRegion& r, const RegionCell& c, double rel_tol = 1e-9);

}  // namespace mpsa
