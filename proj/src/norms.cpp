#include "mpsa/norms.hpp"

#include <cmath>

namespace mpsa {

std::vector<InteractionRegion> build_regions(const Mesh& mesh, const QuadratureRule& rule) {
  std::vector<InteractionRegion> out;
  out.reserve(mesh.num_vertices());
  for (int s = 0; s < mesh.num_vertices(); ++s) out.push_back(build_region(mesh, s, rule));
  return out;
}

DField zero_dfield(const std::vector<InteractionRegion>& regions, int num_cells, int nc) {
  DField u;
  u.ncomp = nc;
  u.cells = Eigen::VectorXd::Zero(num_cells * nc);
  for (const auto& r : regions) {
    std::vector<Eigen::MatrixXd> faces;
    for (const auto& f : r.faces) faces.push_back(Eigen::MatrixXd::Zero(nc, 2 * f.points.size()));
    u.points.push_back(std::move(faces));
  }
  return u;
}

CField zero_cfield(const std::vector<InteractionRegion>& regions, int num_cells, int nc) {
  CField u;
  u.ncomp = nc;
  u.cells = Eigen::VectorXd::Zero(num_cells * nc);
  for (const auto& r : regions) u.faces.emplace_back(r.faces.size(), Eigen::VectorXd::Zero(nc));
  return u;
}

DField project_d(const std::vector<InteractionRegion>& regions, const CField& u) {
  DField d = zero_dfield(regions, static_cast<int>(u.cells.size()) / u.ncomp, u.ncomp);
  d.cells = u.cells;
  for (std::size_t s = 0; s < regions.size(); ++s)
    for (std::size_t lf = 0; lf < regions[s].faces.size(); ++lf)
      d.points[s][lf].colwise() = u.faces[s][lf];
  return d;
}

namespace {

// <u>_s^sigma of a D field, zero on Dirichlet faces.
Eigen::VectorXd face_average(const RegionFace& f, const Eigen::MatrixXd& pts, int nc) {
  Eigen::VectorXd avg = Eigen::VectorXd::Zero(nc);
  if (f.tag == BoundaryTag::Dirichlet) return avg;
  const int np = static_cast<int>(f.points.size());
  const int nsides = f.is_boundary() ? 1 : 2;
  for (int side = 0; side < nsides; ++side)
    for (int b = 0; b < np; ++b) avg += f.weights[b] * pts.col(side * np + b);
  return avg / (f.length * nsides);
}

}  // namespace

CField project_c(const std::vector<InteractionRegion>& regions, const DField& u) {
  CField c = zero_cfield(regions, static_cast<int>(u.cells.size()) / u.ncomp, u.ncomp);
  c.cells = u.cells;
  for (std::size_t s = 0; s < regions.size(); ++s)
    for (std::size_t lf = 0; lf < regions[s].faces.size(); ++lf)
      c.faces[s][lf] = face_average(regions[s].faces[lf], u.points[s][lf], u.ncomp);
  return c;
}

CellField project_t(const DField& u) {
  CellField c(static_cast<int>(u.cells.size()) / u.ncomp, u.ncomp);
  c.values = u.cells;
  return c;
}

CellField project_t(const CField& u) {
  CellField c(static_cast<int>(u.cells.size()) / u.ncomp, u.ncomp);
  c.values = u.cells;
  return c;
}

double seminorm_t(const Mesh& mesh, const CellField& u) {
  double sum = 0.0;
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const Face& face = mesh.face(f);
    const Vec2 a = mesh.vertex(face.vertices[0]);
    const Vec2 b = mesh.vertex(face.vertices[1]);
    const Vec2 n = Vec2(b.y() - a.y(), a.x() - b.x()).normalized();
    const Vec2 mid = 0.5 * (a + b);
    const double len = (b - a).norm();
    if (face.is_boundary() && face.tag != BoundaryTag::Dirichlet) continue;
    Eigen::VectorXd gamma = Eigen::VectorXd::Zero(u.ncomp);
    if (!face.is_boundary()) {
      double wsum = 0.0;
      for (int k : face.cells) {
        const double w = 1.0 / std::abs((mid - mesh.center(k)).dot(n));
        gamma += w * u.at(k);
        wsum += w;
      }
      gamma /= wsum;
    }
    for (int i = 0; i < face.num_cells(); ++i) {
      const int k = face.cells[i];
      const double d = std::abs((mid - mesh.center(k)).dot(n));
      sum += len / d * (gamma - u.at(k)).squaredNorm();
    }
  }
  return std::sqrt(sum);
}

double seminorm_t_local_sq(const InteractionRegion& r, const CellField& u) {
  double sum = 0.0;
  for (const auto& c : r.cells)
    for (int side = 0; side < 2; ++side) {
      const RegionFace& f = r.faces[c.faces[side]];
      if (f.tag == BoundaryTag::Neumann) continue;
      Eigen::VectorXd gamma = Eigen::VectorXd::Zero(u.ncomp);
      if (!f.is_boundary()) {
        double wsum = 0.0;
        for (int i = 0; i < 2; ++i) {
          const RegionCell& ci = r.cells[f.cells[i]];
          const double w = 1.0 / ci.distances[f.sides[i]];
          gamma += w * u.at(ci.cell);
          wsum += w;
        }
        gamma /= wsum;
      }
      sum += f.length / c.distances[side] * (gamma - u.at(c.cell)).squaredNorm();
    }
  return sum;
}

double seminorm_d_local_sq(const InteractionRegion& r, const DField& u, int s) {
  const int nc = u.ncomp;
  double sum = 0.0;
  for (const auto& c : r.cells)
    for (int side = 0; side < 2; ++side) {
      const int lf = c.faces[side];
      const RegionFace& f = r.faces[lf];
      const Eigen::MatrixXd& pts = u.points[s][lf];
      const double d = c.distances[side];
      const double w = c.area / (d * d);
      sum += w * (u.cells.segment(c.cell * nc, nc) - face_average(f, pts, nc)).squaredNorm();
      if (f.is_boundary()) continue;
      const int np = static_cast<int>(f.points.size());
      double jump = 0.0;
      for (int b = 0; b < np; ++b) jump += f.weights[b] * (pts.col(b) - pts.col(np + b)).squaredNorm();
      sum += w * jump / f.length;
    }
  return sum;
}

double seminorm_d(const std::vector<InteractionRegion>& regions, const DField& u) {
  double sum = 0.0;
  for (std::size_t s = 0; s < regions.size(); ++s) sum += seminorm_d_local_sq(regions[s], u, static_cast<int>(s));
  return std::sqrt(sum);
}

double seminorm_c(const std::vector<InteractionRegion>& regions, const CField& u) {
  return seminorm_d(regions, project_d(regions, u));
}

DField fv_projection(const Discretization& disc, const GlobalSystem& sys, const CellField& u) {
  const Mesh& mesh = *disc.mesh;
  const int nc = disc.ncomp();
  DField out;
  out.ncomp = nc;
  out.cells = u.values;
  out.points.resize(mesh.num_vertices());
  for (int s = 0; s < mesh.num_vertices(); ++s) {
    const LocalSolution& l = disc.locals[s];
    const InteractionRegion& r = l.region;
    const Eigen::VectorXd g = local_gradients(disc, sys, u, s);
    const Eigen::VectorXd ul = l.gather(u.values);
    for (const auto& f : r.faces) {
      const int np = static_cast<int>(f.points.size());
      Eigen::MatrixXd pts = Eigen::MatrixXd::Zero(nc, 2 * np);
      for (int i = 0; i < (f.is_boundary() ? 1 : 2); ++i)
        pts.middleCols(i * np, np) = l.face_values(ul, g, f.cells[i], f.sides[i]);
      out.points[s].push_back(pts);
    }
  }
  return out;
}

void triangle_rule(const Vec2& a, const Vec2& b, const Vec2& c, std::array<Vec2, 7>& points,
                   std::array<double, 7>& weights) {
  constexpr double a1 = 0.0597158717897698, b1 = 0.4701420641051151, w1 = 0.1323941527885062;
  constexpr double a2 = 0.7974269853530873, b2 = 0.1012865073234563, w2 = 0.1259391805448271;
  const double area = 0.5 * std::abs((b - a).x() * (c - a).y() - (b - a).y() * (c - a).x());
  auto at = [&](double l0, double l1, double l2) { return Vec2(l0 * a + l1 * b + l2 * c); };
  points = {at(1.0 / 3, 1.0 / 3, 1.0 / 3), at(a1, b1, b1), at(b1, a1, b1), at(b1, b1, a1),
            at(a2, b2, b2), at(b2, a2, b2), at(b2, b2, a2)};
  weights = {0.225, w1, w1, w1, w2, w2, w2};
  for (double& w : weights) w *= area;
}

ErrorNorms measure_errors(const Discretization& disc, const GlobalSystem& sys, const CellField& u,
                          const ExactField& exact) {
  const Mesh& mesh = *disc.mesh;
  const int nc = disc.ncomp();
  ErrorNorms e;

  CellField err(mesh.num_cells(), nc);
  for (int k = 0; k < mesh.num_cells(); ++k) err.at(k) = u.at(k) - exact.value(mesh.center(k));
  e.t_u = seminorm_t(mesh, err);

  double l2 = 0.0, st = 0.0;
  for (int s = 0; s < mesh.num_vertices(); ++s) {
    const LocalSolution& l = disc.locals[s];
    const Eigen::VectorXd g = local_gradients(disc, sys, u, s);
    for (int i = 0; i < l.region.num_cells(); ++i) {
      const RegionCell& c = l.region.cells[i];
      const Eigen::MatrixXd grad = l.gradient(g, i);
      if (nc == 2) e.max_div = std::max(e.max_div, std::abs(grad.trace()));
      const Eigen::MatrixXd d =
          stress_operator(nc == 1 ? Law::Scalar : Law::Hooke, disc.material.mu[c.cell], disc.material.lambda[c.cell]);
      const Values uk = u.at(c.cell);
      const std::array<std::array<Vec2, 3>, 2> tris{{{c.corners[0], c.corners[1], c.corners[2]},
                                                     {c.corners[0], c.corners[2], c.corners[3]}}};
      for (const auto& t : tris) {
        std::array<Vec2, 7> p;
        std::array<double, 7> w;
        triangle_rule(t[0], t[1], t[2], p, w);
        for (int q = 0; q < 7; ++q) {
          const Eigen::VectorXd approx = uk + grad * (p[q] - c.center);
          l2 += w[q] * (approx - exact.value(p[q])).squaredNorm();
          const Eigen::MatrixXd dg = grad - exact.gradient(p[q]);
          Eigen::VectorXd flat(nc * 2);
          for (int comp = 0; comp < nc; ++comp)
            for (int j = 0; j < 2; ++j) flat(comp * 2 + j) = dg(comp, j);
          st += w[q] * (d * flat).squaredNorm();
        }
      }
    }
  }
  e.l2_u = std::sqrt(l2);
  e.stress = std::sqrt(st);
  return e;
}

}  // namespace mpsa
