#include "mpsa/global_solver.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <thread>

namespace mpsa {

Discretization discretize(const Mesh& mesh, const MaterialField& material, const Formulation& form, int threads) {
  material.validate(mesh.num_cells());
  Discretization disc;
  disc.mesh = &mesh;
  disc.material = material;
  disc.form = form;
  const int nv = mesh.num_vertices();
  disc.locals.resize(nv);
  std::vector<std::exception_ptr> errors(nv);
  auto work = [&](int begin, int end) {
    for (int s = begin; s < end; ++s) {
      try {
        disc.locals[s] = solve_local(mesh, material, form, s);
      } catch (...) {
        errors[s] = std::current_exception();
      }
    }
  };
  threads = std::clamp(threads, 1, std::max(1, nv));
  if (threads == 1) {
    work(0, nv);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (nv + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work, t * chunk, std::min(nv, (t + 1) * chunk));
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return disc;
}

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

Eigen::VectorXd body_force_integrals(const Discretization& disc, const ProblemData& problem, int nc) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(disc.mesh->num_cells() * nc);
  for (const LocalSolution& loc : disc.locals)
    for (const RegionCell& c : loc.region.cells) {
      const Values f = problem.body_force(polygon_centroid(c.corners));
      if (f.size() != nc) throw ConfigError("body force has the wrong number of components");
      out.segment(c.cell * nc, nc) += c.area * f;
    }
  return out;
}

void check_weights(const Discretization& disc) {
  if (!disc.mesh) throw ConfigError("discretization has no mesh");
  if (static_cast<int>(disc.locals.size()) != disc.mesh->num_vertices())
    throw ConfigError("stress weights missing for some vertices");
  for (int s = 0; s < disc.mesh->num_vertices(); ++s)
    if (disc.locals[s].region.vertex != s) throw ConfigError(fmt::format("stress weights missing for vertex {}", s));
}

}  // namespace

GlobalSystem assemble(const Discretization& disc, const ProblemData& problem) {
  check_weights(disc);
  const Mesh& mesh = *disc.mesh;
  const int nc = disc.ncomp();
  const int n = mesh.num_cells() * nc;
  GlobalSystem sys;
  sys.ncomp = nc;
  sys.pure_neumann = mesh.all_neumann();
  sys.galerkin = disc.form.pairing == Pairing::Gradient;
  sys.body_force = body_force_integrals(disc, problem, nc);
  sys.b = sys.body_force;
  Triplets trip;

  for (int s = 0; s < mesh.num_vertices(); ++s) {
    const LocalSolution& loc = disc.locals[s];
    const InteractionRegion& r = loc.region;
    const Eigen::VectorXd d = loc.data(problem);
    sys.data.push_back(d);
    auto global_row = [&](int cell, int comp) { return r.cells[cell].cell * nc + comp; };

    if (!sys.galerkin) {
      for (int i = 0; i < r.num_cells(); ++i)
        for (int side = 0; side < 2; ++side) {
          const RegionFace& f = r.faces[r.cells[i].faces[side]];
          const int row = loc.traction_row(i, side);
          if (f.tag == BoundaryTag::Neumann) {
            for (int q = 0; q < static_cast<int>(loc.slots.size()); ++q)
              if (loc.slots[q].face == r.cells[i].faces[side])
                for (int c = 0; c < nc; ++c) sys.b(global_row(i, c)) += d(q * nc + c);
            continue;
          }
          for (int c = 0; c < nc; ++c) {
            for (int j = 0; j < r.num_cells(); ++j)
              for (int c2 = 0; c2 < nc; ++c2) {
                const double v = loc.Tu(row + c, j * nc + c2);
                if (v != 0.0) trip.emplace_back(global_row(i, c), global_row(j, c2), -v);
              }
            if (d.size()) sys.b(global_row(i, c)) += loc.Td.row(row + c).dot(d);
          }
        }
      continue;
    }

    // Galerkin form of the symmetric finite difference method.
    const int ng = static_cast<int>(loc.Pu.rows());
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(ng, ng);
    for (int i = 0; i < r.num_cells(); ++i) {
      const int off = loc.grad_index(i, 0, 0);
      k.block(off, off, nc * 2, nc * 2) = r.cells[i].area * loc.stress[i];
    }
    const Eigen::MatrixXd kpu = k * loc.Pu;
    const Eigen::MatrixXd m = loc.Pu.transpose() * kpu;
    Eigen::VectorXd load = Eigen::VectorXd::Zero(loc.num_unknowns());
    if (d.size()) load -= loc.Pu.transpose() * (k * (loc.Pd * d));
    // Neumann load tested with the affine subcell reconstruction of the test function.
    Eigen::VectorXd q = Eigen::VectorXd::Zero(ng);
    for (const DataSlot& slot : loc.slots) {
      if (slot.kind != DataSlot::Kind::Neumann) continue;
      const RegionFace& f = r.faces[slot.face];
      const RegionCell& c = r.cells[slot.cell];
      std::array<Vec2, 2> p;
      std::array<double, 2> w;
      gauss2(r.x, 2.0 * f.midpoint - r.x, p, w);
      for (int b = 0; b < 2; ++b) {
        const Values gn = problem.neumann(p[b], c.normals[slot.side]);
        for (int comp = 0; comp < nc; ++comp) {
          load(slot.cell * nc + comp) += w[b] * gn(comp);
          for (int j = 0; j < 2; ++j) q(loc.grad_index(slot.cell, comp, j)) += w[b] * gn(comp) * (p[b] - c.center)(j);
        }
      }
    }
    load += loc.Pu.transpose() * q;
    for (int a = 0; a < loc.num_unknowns(); ++a) {
      const int ga = r.cells[a / nc].cell * nc + a % nc;
      sys.b(ga) += load(a);
      for (int b = 0; b < loc.num_unknowns(); ++b)
        if (m(a, b) != 0.0) trip.emplace_back(ga, r.cells[b / nc].cell * nc + b % nc, m(a, b));
    }
  }
  sys.A.resize(n, n);
  sys.A.setFromTriplets(trip.begin(), trip.end());
  sys.A.makeCompressed();
  return sys;
}

SolverMethod parse_solver_method(const std::string& name) {
  if (name == "auto") return SolverMethod::Auto;
  if (name == "direct") return SolverMethod::Direct;
  if (name == "cg") return SolverMethod::CG;
  if (name == "bicgstab") return SolverMethod::BiCGSTAB;
  throw ConfigError(fmt::format("unknown solver method '{}'", name));
}

std::string to_string(SolverMethod method) {
  switch (method) {
    case SolverMethod::Auto: return "auto";
    case SolverMethod::Direct: return "direct";
    case SolverMethod::CG: return "cg";
    case SolverMethod::BiCGSTAB: return "bicgstab";
  }
  return "?";
}

Eigen::MatrixXd rigid_basis(const Mesh& mesh, int ncomp, bool orthonormal) {
  const int nk = mesh.num_cells();
  Vec2 xc = Vec2::Zero();
  for (int k = 0; k < nk; ++k) xc += mesh.area(k) * mesh.center(k);
  xc /= mesh.total_area();
  Eigen::MatrixXd r;
  if (ncomp == 1) {
    r = Eigen::MatrixXd::Ones(nk, 1);
  } else {
    r = Eigen::MatrixXd::Zero(2 * nk, 3);
    for (int k = 0; k < nk; ++k) {
      const Vec2 x = mesh.center(k) - xc;
      r(2 * k, 0) = 1.0;
      r(2 * k + 1, 1) = 1.0;
      r(2 * k, 2) = -x.y();
      r(2 * k + 1, 2) = x.x();
    }
  }
  if (orthonormal) {
    Eigen::VectorXd w(r.rows());
    for (int k = 0; k < nk; ++k) w.segment(k * ncomp, ncomp).setConstant(mesh.area(k));
    const Eigen::VectorXd sw = w.cwiseSqrt();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(sw.asDiagonal() * r);
    r = sw.cwiseInverse().asDiagonal() * (qr.householderQ() * Eigen::MatrixXd::Identity(r.rows(), r.cols()));
  }
  return r;
}

double symmetry_defect(const Eigen::SparseMatrix<double>& a) {
  const Eigen::SparseMatrix<double> at = a.transpose();
  const Eigen::SparseMatrix<double> diff = a - at;
  double dmax = 0.0, amax = 0.0;
  for (int j = 0; j < diff.outerSize(); ++j)
    for (Eigen::SparseMatrix<double>::InnerIterator it(diff, j); it; ++it) dmax = std::max(dmax, std::abs(it.value()));
  for (int j = 0; j < a.outerSize(); ++j)
    for (Eigen::SparseMatrix<double>::InnerIterator it(a, j); it; ++it) amax = std::max(amax, std::abs(it.value()));
  return amax > 0.0 ? dmax / amax : 0.0;
}

namespace {

double relative_residual(const Eigen::SparseMatrix<double>& a, const Eigen::VectorXd& u, const Eigen::VectorXd& b) {
  const double r = (a * u - b).norm();
  const double nb = b.norm();
  return nb > 0.0 ? r / nb : r;
}

SolveResult solve_pure_neumann(const GlobalSystem& sys, const Mesh& mesh, const SolverOptions& options) {
  const int nc = sys.ncomp;
  const int n = static_cast<int>(sys.b.size());
  // Translational compatibility: the loads must sum to zero per component.
  for (int c = 0; c < nc; ++c) {
    double sum = 0.0, scale = 0.0;
    for (int k = 0; k < mesh.num_cells(); ++k) {
      sum += sys.b(k * nc + c);
      scale += std::abs(sys.b(k * nc + c));
    }
    if (std::abs(sum) > options.compat_tol * std::max(scale, 1e-300) && std::abs(sum) > 1e-300)
      throw ConfigError(fmt::format("pure Neumann data are incompatible: net load {:.6g} in component {} "
                                    "(relative {:.3g} exceeds {:.3g})",
                                    sum, c, std::abs(sum) / scale, options.compat_tol));
  }
  const Eigen::MatrixXd r = rigid_basis(mesh, nc, true);
  const int m = static_cast<int>(r.cols());
  Eigen::VectorXd w(n);
  for (int k = 0; k < mesh.num_cells(); ++k) w.segment(k * nc, nc).setConstant(mesh.area(k));
  std::vector<Eigen::Triplet<double>> trip;
  for (int j = 0; j < sys.A.outerSize(); ++j)
    for (Eigen::SparseMatrix<double>::InnerIterator it(sys.A, j); it; ++it)
      trip.emplace_back(it.row(), it.col(), it.value());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) {
      if (r(i, j) == 0.0) continue;
      trip.emplace_back(i, n + j, r(i, j));
      trip.emplace_back(n + j, i, w(i) * r(i, j));
    }
  Eigen::SparseMatrix<double> big(n + m, n + m);
  big.setFromTriplets(trip.begin(), trip.end());
  big.makeCompressed();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + m);
  rhs.head(n) = sys.b;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(big);
  if (lu.info() != Eigen::Success) throw NumericalError("bordered pure Neumann system is singular");
  const Eigen::VectorXd x = lu.solve(rhs);
  SolveResult res;
  res.method = "direct-bordered";
  res.u = CellField(mesh.num_cells(), nc);
  res.u.values = x.head(n);
  // Post-projection removes the round-off rigid component left by the solve.
  const Eigen::VectorXd coef = r.transpose() * (w.asDiagonal() * res.u.values);
  res.u.values -= r * coef;
  res.nullspace_projected = true;
  res.nullspace_correction = (r * x.tail(m)).norm();
  res.residual = ((sys.A * res.u.values - sys.b) + r * x.tail(m)).norm() / std::max(sys.b.norm(), 1e-300);
  if (sys.b.norm() == 0.0) res.residual = (sys.A * res.u.values).norm();
  return res;
}

}  // namespace

SolveResult solve(const GlobalSystem& sys, const Mesh& mesh, const SolverOptions& options) {
  if (sys.pure_neumann) return solve_pure_neumann(sys, mesh, options);
  const int n = static_cast<int>(sys.b.size());
  SolverMethod method = options.method;
  if (method == SolverMethod::Auto) method = n <= options.direct_limit ? SolverMethod::Direct : SolverMethod::BiCGSTAB;
  SolveResult res;
  res.method = to_string(method);
  res.u = CellField(mesh.num_cells(), sys.ncomp);
  switch (method) {
    case SolverMethod::Auto:
    case SolverMethod::Direct: {
      Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
      lu.compute(sys.A);
      if (lu.info() != Eigen::Success) throw NumericalError("global matrix is singular (sparse LU failed)");
      res.u.values = lu.solve(sys.b);
      break;
    }
    case SolverMethod::CG: {
      const double defect = symmetry_defect(sys.A);
      if (defect > 1e-10)
        throw ConfigError(fmt::format("conjugate gradients requested for a nonsymmetric matrix "
                                      "(max|A - A^T| / max|A| = {:.3g}); use direct or bicgstab",
                                      defect));
      Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg;
      cg.setTolerance(options.tol);
      cg.setMaxIterations(options.max_iter);
      cg.compute(sys.A);
      res.u.values = cg.solve(sys.b);
      res.iterations = static_cast<int>(cg.iterations());
      if (cg.info() != Eigen::Success)
        throw NumericalError(fmt::format("conjugate gradients did not converge after {} iterations (residual {:.3g})",
                                         cg.iterations(), cg.error()));
      break;
    }
    case SolverMethod::BiCGSTAB: {
      Eigen::BiCGSTAB<Eigen::SparseMatrix<double>, Eigen::IncompleteLUT<double>> bicg;
      bicg.setTolerance(options.tol);
      bicg.setMaxIterations(options.max_iter);
      bicg.compute(sys.A);
      res.u.values = bicg.solve(sys.b);
      res.iterations = static_cast<int>(bicg.iterations());
      if (bicg.info() != Eigen::Success)
        throw NumericalError(fmt::format("BiCGSTAB did not converge after {} iterations (residual {:.3g})",
                                         bicg.iterations(), bicg.error()));
      break;
    }
  }
  if (!res.u.values.allFinite()) throw NumericalError("global solve produced non-finite values");
  res.residual = relative_residual(sys.A, res.u.values, sys.b);
  return res;
}

Eigen::VectorXd local_gradients(const Discretization& disc, const GlobalSystem& sys, const CellField& u, int s) {
  const LocalSolution& loc = disc.locals[s];
  Eigen::VectorXd g = loc.Pu * loc.gather(u.values);
  if (sys.data[s].size()) g += loc.Pd * sys.data[s];
  return g;
}

TractionTable recover_tractions(const Discretization& disc, const GlobalSystem& sys, const CellField& u) {
  const Mesh& mesh = *disc.mesh;
  const int nc = disc.ncomp();
  TractionTable table;
  table.face_totals.assign(mesh.num_faces(), {Values::Zero(nc), Values::Zero(nc)});
  for (int s = 0; s < mesh.num_vertices(); ++s) {
    const LocalSolution& loc = disc.locals[s];
    const InteractionRegion& r = loc.region;
    const Eigen::VectorXd& d = sys.data[s];
    Eigen::VectorXd t = loc.Tu * loc.gather(u.values);
    if (d.size()) t += loc.Td * d;
    for (int i = 0; i < r.num_cells(); ++i)
      for (int side = 0; side < 2; ++side) {
        const int lf = r.cells[i].faces[side];
        const RegionFace& f = r.faces[lf];
        Values v = t.segment(loc.traction_row(i, side), nc);
        if (f.tag == BoundaryTag::Neumann)
          for (int q = 0; q < static_cast<int>(loc.slots.size()); ++q)
            if (loc.slots[q].face == lf) v = d.segment(q * nc, nc);
        table.subfaces.push_back({s, f.face, r.cells[i].cell, v});
        const Face& face = mesh.face(f.face);
        table.face_totals[f.face][face.cells[0] == r.cells[i].cell ? 0 : 1] += v;
      }
  }
  return table;
}

std::vector<double> force_balance_residual(const Mesh& mesh, const TractionTable& tractions, const GlobalSystem& sys) {
  const int nc = sys.ncomp;
  std::vector<Values> sum(mesh.num_cells(), Values::Zero(nc));
  std::vector<double> scale(mesh.num_cells(), 0.0);
  for (const auto& st : tractions.subfaces) {
    sum[st.cell] += st.t;
    scale[st.cell] += st.t.norm();
  }
  std::vector<double> out(mesh.num_cells());
  for (int k = 0; k < mesh.num_cells(); ++k) {
    const Values f = sys.body_force.segment(k * nc, nc);
    const double denom = scale[k] + f.norm();
    const double num = (sum[k] + f).norm();
    out[k] = denom > 0.0 ? num / denom : num;
  }
  return out;
}

void write_solution_csv(const std::string& path, const Mesh& mesh, const CellField& u) {
  std::ofstream out(path);
  if (!out) throw ConfigError(fmt::format("cannot write '{}'", path));
  out << (u.ncomp == 1 ? "cell_id,x,y,u\n" : "cell_id,x,y,ux,uy\n");
  for (int k = 0; k < mesh.num_cells(); ++k) {
    const Vec2& x = mesh.center(k);
    out << fmt::format("{},{:.17g},{:.17g}", k, x.x(), x.y());
    for (int c = 0; c < u.ncomp; ++c) out << fmt::format(",{:.17g}", u.at(k)(c));
    out << '\n';
  }
}

void write_traction_csv(const std::string& path, const Mesh& mesh, const TractionTable& tractions) {
  std::ofstream out(path);
  if (!out) throw ConfigError(fmt::format("cannot write '{}'", path));
  const bool scalar = !tractions.face_totals.empty() && tractions.face_totals[0][0].size() == 1;
  out << (scalar ? "face_id,side_cell,flux\n" : "face_id,side_cell,Tx,Ty\n");
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const Face& face = mesh.face(f);
    for (int i = 0; i < face.num_cells(); ++i) {
      out << fmt::format("{},{}", f, face.cells[i]);
      for (Eigen::Index c = 0; c < tractions.face_totals[f][i].size(); ++c)
        out << fmt::format(",{:.17g}", tractions.face_totals[f][i](c));
      out << '\n';
    }
  }
}

}  // namespace mpsa
