#include "mpsa/local_assembly.hpp"

#include <Eigen/LU>
#include <Eigen/QR>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>

namespace mpsa {

Eigen::MatrixXd stress_operator(Law law, double mu, double lambda) {
  if (law == Law::Scalar) return mu * Eigen::MatrixXd::Identity(2, 2);
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(4, 4);
  const double tr_coef = law == Law::Hooke ? lambda : lambda + mu;
  for (int c = 0; c < 2; ++c)
    for (int j = 0; j < 2; ++j) {
      if (law == Law::Hooke) {
        d(c * 2 + j, c * 2 + j) += mu;
        d(c * 2 + j, j * 2 + c) += mu;
      } else {
        d(c * 2 + j, c * 2 + j) += mu;
      }
    }
  for (int c = 0; c < 2; ++c) {
    d(c * 2 + c, 0) += tr_coef;
    d(c * 2 + c, 3) += tr_coef;
  }
  return d;
}

double stabilization_weight(const InteractionRegion& r, const RegionFace& f, const MaterialField& material,
                            const Formulation& form) {
  if (form.alpha) return *form.alpha;
  auto stiffness = [&](int local) {
    const int k = r.cells[local].cell;
    return form.law == Law::Scalar ? material.mu[k] : 2.0 * material.mu[k] + material.lambda[k];
  };
  if (f.is_boundary()) return stiffness(f.cells[0]);
  const double a = stiffness(f.cells[0]);
  const double b = stiffness(f.cells[1]);
  return 2.0 * a * b / (a + b);
}

Eigen::VectorXd LocalSolution::gather(const Eigen::VectorXd& cell_values) const {
  Eigen::VectorXd u(num_unknowns());
  for (int i = 0; i < region.num_cells(); ++i)
    u.segment(i * ncomp, ncomp) = cell_values.segment(region.cells[i].cell * ncomp, ncomp);
  return u;
}

Eigen::VectorXd LocalSolution::data(const ProblemData& problem) const {
  Eigen::VectorXd d(num_data());
  for (std::size_t q = 0; q < slots.size(); ++q) {
    const DataSlot& slot = slots[q];
    const RegionFace& f = region.faces[slot.face];
    Values v;
    if (slot.kind == DataSlot::Kind::Dirichlet) {
      v = problem.dirichlet(f.points[slot.point]);
    } else {
      const Vec2& n = region.cells[slot.cell].normals[slot.side];
      std::array<Vec2, 2> p;
      std::array<double, 2> w;
      gauss2(region.x, 2.0 * f.midpoint - region.x, p, w);
      v = w[0] * problem.neumann(p[0], n) + w[1] * problem.neumann(p[1], n);
    }
    if (v.size() != ncomp) throw ConfigError("boundary data has the wrong number of components");
    d.segment(static_cast<Eigen::Index>(q) * ncomp, ncomp) = v;
  }
  return d;
}

Eigen::MatrixXd LocalSolution::gradient(const Eigen::VectorXd& g, int cell) const {
  Eigen::MatrixXd m(ncomp, 2);
  for (int c = 0; c < ncomp; ++c)
    for (int j = 0; j < 2; ++j) m(c, j) = g(grad_index(cell, c, j));
  return m;
}

Eigen::MatrixXd LocalSolution::face_values(const Eigen::VectorXd& u, const Eigen::VectorXd& g, int cell,
                                           int side) const {
  const RegionCell& c = region.cells[cell];
  const RegionFace& f = region.faces[c.faces[side]];
  const Eigen::MatrixXd grad = gradient(g, cell);
  Eigen::MatrixXd vals(ncomp, f.points.size());
  for (std::size_t b = 0; b < f.points.size(); ++b)
    vals.col(static_cast<Eigen::Index>(b)) = u.segment(cell * ncomp, ncomp) + grad * (f.points[b] - c.center);
  return vals;
}

LocalSolution solve_local(const Mesh& mesh, const MaterialField& material, const Formulation& form, int s) {
  LocalSolution sol;
  sol.region = build_region(mesh, s, form.rule);
  sol.form = form;
  sol.ncomp = form.ncomp();
  const InteractionRegion& r = sol.region;
  const int nc = sol.ncomp;
  const int ncell = r.num_cells();
  const int ng = ncell * nc * 2;
  const int nu = ncell * nc;

  double stiff_max = 0.0;
  for (const auto& c : r.cells) {
    const int k = c.cell;
    sol.stress.push_back(stress_operator(form.law, material.mu[k], material.lambda[k]));
    stiff_max = std::max(stiff_max, form.law == Law::Scalar ? material.mu[k] : 2.0 * material.mu[k] + material.lambda[k]);
  }
  for (const auto& f : r.faces) {
    if (f.tag == BoundaryTag::Unset)
      throw ConfigError(fmt::format("boundary face {} at vertex {} has no boundary condition", f.face, s));
    sol.alpha.push_back(stabilization_weight(r, f, material, form));
  }

  // Data slots: Dirichlet continuity points, then Neumann subfaces, in face order.
  for (int lf = 0; lf < r.num_faces(); ++lf) {
    const RegionFace& f = r.faces[lf];
    if (f.tag == BoundaryTag::Dirichlet)
      for (int b = 0; b < static_cast<int>(f.points.size()); ++b)
        sol.slots.push_back({DataSlot::Kind::Dirichlet, lf, b, f.cells[0], f.sides[0]});
    else if (f.tag == BoundaryTag::Neumann)
      sol.slots.push_back({DataSlot::Kind::Neumann, lf, 0, f.cells[0], f.sides[0]});
  }
  const int nd = sol.num_data();
  auto slot_of = [&](int lf, int point) {
    for (int q = 0; q < static_cast<int>(sol.slots.size()); ++q)
      if (sol.slots[q].face == lf && sol.slots[q].point == point) return q;
    return -1;
  };

  // Row of the physical traction (or pseudo-traction for Gradient pairing) of
  // (cell, side) with respect to that cell's gradient block.
  auto pairing_row = [&](int cell, int side, bool physical) {
    const RegionCell& c = r.cells[cell];
    Vec2 v;
    double m;
    if (physical || form.pairing == Pairing::Traction) {
      v = c.normals[side];
      m = r.faces[c.faces[side]].length;
    } else {
      v = c.g.row(side).transpose();
      m = c.area;
    }
    Eigen::MatrixXd row = Eigen::MatrixXd::Zero(nc, ng);
    const Eigen::MatrixXd& d = sol.stress[cell];
    for (int comp = 0; comp < nc; ++comp)
      for (int j = 0; j < 2; ++j)
        row.block(comp, sol.grad_index(cell, 0, 0), 1, nc * 2) += m * v(j) * d.row(comp * 2 + j);
    return row;
  };

  // Jump rows: interior continuity points and weak Dirichlet points.
  std::vector<Eigen::MatrixXd> jg_rows, ju_rows, jd_rows;
  std::vector<double> weights;
  for (int lf = 0; lf < r.num_faces(); ++lf) {
    const RegionFace& f = r.faces[lf];
    if (f.tag == BoundaryTag::Neumann) continue;
    for (int b = 0; b < static_cast<int>(f.points.size()); ++b) {
      Eigen::MatrixXd jg = Eigen::MatrixXd::Zero(nc, ng), ju = Eigen::MatrixXd::Zero(nc, nu),
                      jd = Eigen::MatrixXd::Zero(nc, nd);
      const int nsides = f.is_boundary() ? 1 : 2;
      for (int side = 0; side < nsides; ++side) {
        const int cell = f.cells[side];
        const double sign = side == 0 ? 1.0 : -1.0;
        const Vec2 dx = f.points[b] - r.cells[cell].center;
        for (int comp = 0; comp < nc; ++comp) {
          ju(comp, cell * nc + comp) = sign;
          for (int j = 0; j < 2; ++j) jg(comp, sol.grad_index(cell, comp, j)) = sign * dx(j);
        }
      }
      if (f.is_boundary()) {
        const int q = slot_of(lf, b);
        for (int comp = 0; comp < nc; ++comp) jd(comp, q * nc + comp) = -1.0;
      }
      jg_rows.push_back(jg);
      ju_rows.push_back(ju);
      jd_rows.push_back(jd);
      weights.push_back(sol.alpha[lf] * f.weights[b] / f.length);
    }
  }

  // Constraint rows: traction continuity on interior subfaces, prescribed traction on Neumann subfaces.
  std::vector<Eigen::MatrixXd> c_rows, cd_rows;
  for (int lf = 0; lf < r.num_faces(); ++lf) {
    const RegionFace& f = r.faces[lf];
    if (f.tag == BoundaryTag::Dirichlet) continue;
    Eigen::MatrixXd c = pairing_row(f.cells[0], f.sides[0], false);
    Eigen::MatrixXd cd = Eigen::MatrixXd::Zero(nc, nd);
    if (f.is_boundary()) {
      const int q = slot_of(lf, 0);
      for (int comp = 0; comp < nc; ++comp) cd(comp, q * nc + comp) = 1.0;
    } else {
      c += pairing_row(f.cells[1], f.sides[1], false);
    }
    c_rows.push_back(c);
    cd_rows.push_back(cd);
  }

  const int nj = static_cast<int>(jg_rows.size()) * nc;
  const int ncon = static_cast<int>(c_rows.size()) * nc;
  Eigen::MatrixXd jg(nj, ng), ju(nj, nu), jd(nj, nd), cg(ncon, ng), cdm(ncon, nd);
  Eigen::VectorXd w(nj);
  for (std::size_t i = 0; i < jg_rows.size(); ++i) {
    jg.middleRows(i * nc, nc) = jg_rows[i];
    ju.middleRows(i * nc, nc) = ju_rows[i];
    jd.middleRows(i * nc, nc) = jd_rows[i];
    w.segment(i * nc, nc).setConstant(weights[i]);
  }
  for (std::size_t i = 0; i < c_rows.size(); ++i) {
    cg.middleRows(i * nc, nc) = c_rows[i];
    cdm.middleRows(i * nc, nc) = cd_rows[i];
  }

  // Nondimensionalize: unknowns are L*G, weights and constraints are divided by the stiffness scale.
  const double len = r.length_scale();
  const double inv = 1.0 / stiff_max;
  jg /= len;
  cg *= inv / len;
  cdm *= inv;
  w *= inv;

  const int n = ng + ncon;
  Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(n, n);
  kkt.topLeftCorner(ng, ng) = jg.transpose() * w.asDiagonal() * jg;
  kkt.topRightCorner(ng, ncon) = cg.transpose();
  kkt.bottomLeftCorner(ncon, ng) = cg;
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n, nu + nd);
  rhs.topLeftCorner(ng, nu) = -jg.transpose() * w.asDiagonal() * ju;
  rhs.topRightCorner(ng, nd) = -jg.transpose() * w.asDiagonal() * jd;
  rhs.bottomRightCorner(ncon, nd) = cdm;

  // Physical tractions with respect to the scaled unknowns.
  Eigen::MatrixXd traction(ncell * 2 * nc, ng);
  for (int i = 0; i < ncell; ++i)
    for (int side = 0; side < 2; ++side) traction.middleRows(sol.traction_row(i, side), nc) = pairing_row(i, side, true);
  const Eigen::MatrixXd traction_scaled = traction * (inv / len);

  Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
  lu.setThreshold(1e-12);
  Eigen::MatrixXd x;
  if (lu.rank() == n) {
    x = lu.solve(rhs);
  } else {
    const Eigen::MatrixXd kernel = lu.kernel();
    for (Eigen::Index j = 0; j < kernel.cols(); ++j) {
      const Eigen::VectorXd v = kernel.col(j) / kernel.col(j).norm();
      const double t = (traction_scaled * v.head(ng)).norm();
      if (t > 1e-8)
        throw IllPosedError(s, fmt::format("KKT matrix of size {} has rank {} and a kernel direction changes the "
                                           "subface tractions (relative size {:.3g})",
                                           n, lu.rank(), t));
    }
    sol.singular = true;
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(kkt);
    cod.setThreshold(1e-12);
    x = cod.solve(rhs);
  }
  if (!x.allFinite()) throw NumericalError(fmt::format("local solve at vertex {} produced non-finite values", s));

  sol.Pu = x.topLeftCorner(ng, nu) / len;
  sol.Pd = x.topRightCorner(ng, nd) / len;
  sol.Tu = traction * sol.Pu;
  sol.Td = traction * sol.Pd;
  if (form.pairing == Pairing::Traction) {
    sol.Su = sol.Tu;
  } else {
    Eigen::MatrixXd paired(ncell * 2 * nc, ng);
    for (int i = 0; i < ncell; ++i)
      for (int side = 0; side < 2; ++side) paired.middleRows(sol.traction_row(i, side), nc) = pairing_row(i, side, false);
    sol.Su = paired * sol.Pu;
  }
  return sol;
}

std::string local_debug_json(const LocalSolution& local) {
  auto mat = [](const Eigen::MatrixXd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      nlohmann::json row = nlohmann::json::array();
      for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
      rows.push_back(row);
    }
    return rows;
  };
  nlohmann::json j;
  j["vertex"] = local.region.vertex;
  std::vector<int> cells;
  for (const auto& c : local.region.cells) cells.push_back(c.cell);
  std::vector<int> faces;
  for (const auto& f : local.region.faces) faces.push_back(f.face);
  j["cells"] = cells;
  j["faces"] = faces;
  j["alpha"] = local.alpha;
  j["singular"] = local.singular;
  j["Pu"] = mat(local.Pu);
  j["Pd"] = mat(local.Pd);
  j["Tu"] = mat(local.Tu);
  j["Td"] = mat(local.Td);
  return j.dump();
}

}  // namespace mpsa
