#include "mpsa/geometry.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace mpsa {

void gauss2(const Vec2& a, const Vec2& b, std::array<Vec2, 2>& points, std::array<double, 2>& weights) {
  const double r = 0.5 / std::sqrt(3.0);
  const double len = (b - a).norm();
  points = {a + (0.5 - r) * (b - a), a + (0.5 + r) * (b - a)};
  weights = {0.5 * len, 0.5 * len};
}

int InteractionRegion::num_interior_faces() const {
  return static_cast<int>(std::count_if(faces.begin(), faces.end(), [](const RegionFace& f) { return !f.is_boundary(); }));
}

int InteractionRegion::local_cell(int k) const {
  for (int i = 0; i < num_cells(); ++i)
    if (cells[i].cell == k) return i;
  return -1;
}

double InteractionRegion::length_scale() const {
  double l = 0.0;
  for (const auto& c : cells) l = std::max(l, (c.center - x).norm());
  return l;
}

namespace {

// Local position of vertex s in cell k.
int corner_index(const Mesh& mesh, int k, int s) {
  auto cv = mesh.cell_vertices(k);
  for (std::size_t j = 0; j < cv.size(); ++j)
    if (cv[j] == s) return static_cast<int>(j);
  throw MeshError(fmt::format("vertex {} is not a corner of cell {}", s, k));
}

}  // namespace

double subcell_area(const Mesh& mesh, int k, int s) {
  auto cv = mesh.cell_vertices(k);
  const int n = static_cast<int>(cv.size());
  const int j = corner_index(mesh, k, s);
  const Vec2& xs = mesh.vertex(s);
  const Vec2 prev = 0.5 * (mesh.vertex(cv[(j + n - 1) % n]) + xs);
  const Vec2 next = 0.5 * (xs + mesh.vertex(cv[(j + 1) % n]));
  const std::array<Vec2, 4> quad{mesh.center(k), prev, xs, next};
  return signed_area(quad);
}

InteractionRegion build_region(const Mesh& mesh, int s, const QuadratureRule& rule) {
  InteractionRegion r;
  r.vertex = s;
  r.x = mesh.vertex(s);

  auto vfaces = mesh.vertex_faces(s);
  for (int f : vfaces) {
    const Face& face = mesh.face(f);
    RegionFace rf;
    rf.face = f;
    rf.other_vertex = face.vertices[0] == s ? face.vertices[1] : face.vertices[0];
    rf.tag = face.tag;
    const Vec2& xv = mesh.vertex(rf.other_vertex);
    rf.face_length = (xv - r.x).norm();
    rf.length = 0.5 * rf.face_length;
    const Vec2 mid = 0.5 * (r.x + xv);
    rf.midpoint = 0.5 * (r.x + mid);
    if (rule.reduced) {
      rf.points = {r.x + rule.eta * (xv - r.x)};
      rf.weights = {rf.length};
    } else {
      std::array<Vec2, 2> p;
      std::array<double, 2> w;
      gauss2(r.x, mid, p, w);
      rf.points.assign(p.begin(), p.end());
      rf.weights.assign(w.begin(), w.end());
    }
    rf.mean = Vec2::Zero();
    for (std::size_t b = 0; b < rf.points.size(); ++b) rf.mean += rf.weights[b] * rf.points[b];
    rf.mean /= rf.length;
    r.faces.push_back(std::move(rf));
  }
  auto local_face = [&](int f) {
    auto it = std::lower_bound(vfaces.begin(), vfaces.end(), f);
    return static_cast<int>(it - vfaces.begin());
  };

  for (int k : mesh.vertex_cells(s)) {
    auto cv = mesh.cell_vertices(k);
    const int n = static_cast<int>(cv.size());
    const int j = corner_index(mesh, k, s);
    const int vp = cv[(j + n - 1) % n];
    const int vn = cv[(j + 1) % n];
    RegionCell c;
    c.cell = k;
    c.center = mesh.center(k);
    c.cell_diameter = mesh.diameter(k);
    const int ci = r.num_cells();
    // Edge vp -> s enters the vertex, edge s -> vn leaves it (counterclockwise cell).
    const std::array<std::pair<Vec2, Vec2>, 2> edges{std::pair{mesh.vertex(vp), r.x}, std::pair{r.x, mesh.vertex(vn)}};
    const std::array<int, 2> gface{mesh.find_face(vp, s), mesh.find_face(s, vn)};
    for (int side = 0; side < 2; ++side) {
      const int lf = local_face(gface[side]);
      c.faces[side] = lf;
      const Vec2 t = edges[side].second - edges[side].first;
      c.normals[side] = Vec2(t.y(), -t.x()).normalized();
      c.distances[side] = (r.faces[lf].midpoint - c.center).dot(c.normals[side]);
      RegionFace& rf = r.faces[lf];
      const int slot = rf.cells[0] < 0 ? 0 : 1;
      rf.cells[slot] = ci;
      rf.sides[slot] = side;
    }
    c.corners = {c.center, 0.5 * (mesh.vertex(vp) + r.x), r.x, 0.5 * (r.x + mesh.vertex(vn))};
    c.area = signed_area(c.corners);
    if (!(c.area > 0.0))
      throw MeshError(fmt::format("degenerate subcell (cell {}, vertex {}): area {:.6g}", k, s, c.area));
    Mat2 v;
    v.row(0) = (r.faces[c.faces[0]].mean - c.center).transpose();
    v.row(1) = (r.faces[c.faces[1]].mean - c.center).transpose();
    const double det = v.determinant();
    if (!(std::abs(det) > 1e-12 * v.squaredNorm()))
      throw MeshError(fmt::format("degenerate subcell (cell {}, vertex {}): subface points collinear with the cell center", k, s));
    c.g = v.inverse().transpose();
    r.cells.push_back(c);
  }
  // Cells were appended in ascending order, so the face cell slots are ascending too.
  return r;
}

Eigen::MatrixXd consistent_gradient(const RegionCell& c, const Eigen::MatrixXd& face_avg, const Values& u_k) {
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(u_k.size(), 2);
  for (int side = 0; side < 2; ++side) g += (face_avg.col(side) - u_k) * c.g.row(side);
  return g;
}

Eigen::MatrixXd fv_gradient(const InteractionRegion& r, const RegionCell& c, const Eigen::MatrixXd& face_avg,
                            const Values& u_k) {
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(u_k.size(), 2);
  for (int side = 0; side < 2; ++side)
    g += r.faces[c.faces[side]].length * (face_avg.col(side) - u_k) * c.normals[side].transpose();
  return g / c.area;
}

Mat2 s_matrix(const InteractionRegion& r, const RegionCell& c) {
  Mat2 s = Mat2::Zero();
  for (int side = 0; side < 2; ++side) {
    const RegionFace& f = r.faces[c.faces[side]];
    s += f.length * (f.mean - c.center) * c.normals[side].transpose();
  }
  return s;
}

bool is_vertex_symmetric(const InteractionRegion& r, const RegionCell& c, double rel_tol) {
  const Vec2 axis = (r.x - c.center).normalized();
  auto reflect = [&](const Vec2& p) {
    const Vec2 q = p - c.center;
    return Vec2(c.center + 2.0 * q.dot(axis) * axis - q);
  };
  const double tol = rel_tol * c.cell_diameter;
  for (const Vec2& p : c.corners) {
    const Vec2 q = reflect(p);
    bool found = false;
    for (const Vec2& other : c.corners) found = found || (q - other).norm() <= tol;
    if (!found) return false;
  }
  return true;
}

}  // namespace mpsa
