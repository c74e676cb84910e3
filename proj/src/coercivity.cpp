#include "mpsa/coercivity.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <thread>

namespace mpsa {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Pencil {
  Eigen::VectorXd values;    // ascending
  Eigen::MatrixXd null_b;    // orthonormal basis of the discarded directions of b
};

// Eigenvalues of (a, b) on the range of the symmetric semidefinite b.
// Directions where b is below rel * max(top eigenvalue of b, ref) count as null.
Pencil pencil(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double ref = 0.0, double rel = 1e-12) {
  Pencil p;
  if (b.rows() == 0) return p;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eb(0.5 * (b + b.transpose()));
  if (eb.info() != Eigen::Success) throw NumericalError("eigensolver failed on a norm matrix");
  const double top = std::max(eb.eigenvalues().cwiseAbs().maxCoeff(), ref);
  std::vector<int> keep, drop;
  for (Eigen::Index i = 0; i < b.rows(); ++i)
    (top > 0.0 && eb.eigenvalues()(i) > rel * top ? keep : drop).push_back(static_cast<int>(i));
  p.null_b.resize(b.rows(), static_cast<Eigen::Index>(drop.size()));
  for (std::size_t j = 0; j < drop.size(); ++j) p.null_b.col(j) = eb.eigenvectors().col(drop[j]);
  if (keep.empty()) return p;
  Eigen::MatrixXd w(b.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j)
    w.col(j) = eb.eigenvectors().col(keep[j]) / std::sqrt(eb.eigenvalues()(keep[j]));
  const Eigen::MatrixXd m = w.transpose() * a * w;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> em(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
  if (em.info() != Eigen::Success) throw NumericalError("eigensolver failed on a pencil");
  p.values = em.eigenvalues();
  return p;
}

// Orthonormal basis of the complement of span(r).
Eigen::MatrixXd complement(const Eigen::MatrixXd& r, Eigen::Index n) {
  if (r.cols() == 0) return Eigen::MatrixXd::Identity(n, n);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(r, Eigen::ComputeFullU);
  const auto& sv = svd.singularValues();
  const double top = sv.size() ? sv(0) : 0.0;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > 1e-12 * top) ++rank;
  return svd.matrixU().rightCols(n - rank);
}

double harmonic_scale(const InteractionRegion& r, const MaterialField& material, Law law) {
  double inv = 0.0;
  for (const auto& c : r.cells) inv += 1.0 / (law == Law::Scalar ? material.mu[c.cell] : 2.0 * material.mu[c.cell]);
  return r.num_cells() / inv;
}

// Linear maps from the stacked region cell values to H_D data of Pi_FV,s (homogeneous boundary data).
struct LocalMaps {
  int nu = 0;
  int nc = 0;
  std::vector<Eigen::MatrixXd> own;                 // [cell*2 + side] one-sided subface average
  std::vector<Eigen::MatrixXd> average;             // [face] <u>_s^sigma, zero on Dirichlet
  std::vector<std::vector<Eigen::MatrixXd>> jump;   // [face][point], interior faces only
};

LocalMaps local_maps(const LocalSolution& l) {
  const InteractionRegion& r = l.region;
  LocalMaps m;
  m.nc = l.ncomp;
  m.nu = l.num_unknowns();
  auto point_value = [&](int i, int side, int b) {
    const RegionCell& c = r.cells[i];
    const Vec2 dx = r.faces[c.faces[side]].points[b] - c.center;
    Eigen::MatrixXd v = Eigen::MatrixXd::Zero(m.nc, m.nu);
    for (int comp = 0; comp < m.nc; ++comp) {
      v(comp, i * m.nc + comp) = 1.0;
      for (int j = 0; j < 2; ++j) v.row(comp) += dx(j) * l.Pu.row(l.grad_index(i, comp, j));
    }
    return v;
  };
  m.own.resize(static_cast<std::size_t>(r.num_cells()) * 2);
  for (int i = 0; i < r.num_cells(); ++i)
    for (int side = 0; side < 2; ++side) {
      const RegionFace& f = r.faces[r.cells[i].faces[side]];
      Eigen::MatrixXd avg = Eigen::MatrixXd::Zero(m.nc, m.nu);
      for (std::size_t b = 0; b < f.points.size(); ++b) avg += f.weights[b] * point_value(i, side, static_cast<int>(b));
      m.own[i * 2 + side] = avg / f.length;
    }
  m.average.resize(r.faces.size());
  m.jump.resize(r.faces.size());
  for (int lf = 0; lf < r.num_faces(); ++lf) {
    const RegionFace& f = r.faces[lf];
    if (f.tag == BoundaryTag::Dirichlet) {
      m.average[lf] = Eigen::MatrixXd::Zero(m.nc, m.nu);
    } else if (f.is_boundary()) {
      m.average[lf] = m.own[f.cells[0] * 2 + f.sides[0]];
    } else {
      m.average[lf] = 0.5 * (m.own[f.cells[0] * 2 + f.sides[0]] + m.own[f.cells[1] * 2 + f.sides[1]]);
      for (std::size_t b = 0; b < f.points.size(); ++b)
        m.jump[lf].push_back(point_value(f.cells[0], f.sides[0], static_cast<int>(b)) -
                             point_value(f.cells[1], f.sides[1], static_cast<int>(b)));
    }
  }
  return m;
}

Eigen::MatrixXd unit_block(int nc, int nu, int cell) {
  Eigen::MatrixXd e = Eigen::MatrixXd::Zero(nc, nu);
  for (int c = 0; c < nc; ++c) e(c, cell * nc + c) = 1.0;
  return e;
}

}  // namespace

Eigen::MatrixXd local_rigid_basis(const InteractionRegion& r, int ncomp) {
  const int n = r.num_cells();
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n * ncomp, ncomp == 1 ? 1 : 3);
  for (int i = 0; i < n; ++i) {
    if (ncomp == 1) {
      b(i, 0) = 1.0;
      continue;
    }
    const Vec2 d = r.cells[i].center - r.x;
    b(i * 2, 0) = 1.0;
    b(i * 2 + 1, 1) = 1.0;
    b(i * 2, 2) = -d.y();
    b(i * 2 + 1, 2) = d.x();
  }
  return b;
}

VertexAudit audit_vertex(const LocalSolution& l, const MaterialField& material) {
  const InteractionRegion& r = l.region;
  const int nc = l.ncomp;
  const int nu = l.num_unknowns();
  VertexAudit a;
  a.vertex = r.vertex;
  a.singular = l.singular;
  a.vertex_symmetric = true;
  a.s_eig_min = kInf;
  for (const auto& c : r.cells) {
    a.vertex_symmetric = a.vertex_symmetric && is_vertex_symmetric(r, c);
    const Mat2 s = s_matrix(r, c);
    Eigen::SelfAdjointEigenSolver<Mat2> es(s + s.transpose(), Eigen::EigenvaluesOnly);
    a.s_eig_min = std::min(a.s_eig_min, es.eigenvalues()(0));
  }

  const LocalMaps m = local_maps(l);

  // b_{D,s}(u, Pi_C w) = sum T(u) . (<w> - w_K)
  Eigen::MatrixXd form = Eigen::MatrixXd::Zero(nu, nu);
  Eigen::MatrixXd energy = Eigen::MatrixXd::Zero(nu, nu);
  Eigen::MatrixXd jumps = Eigen::MatrixXd::Zero(nu, nu);
  Eigen::MatrixXd nt = Eigen::MatrixXd::Zero(nu, nu);
  Eigen::MatrixXd nd = Eigen::MatrixXd::Zero(nu, nu);
  for (int i = 0; i < r.num_cells(); ++i) {
    const RegionCell& c = r.cells[i];
    const Eigen::MatrixXd ek = unit_block(nc, nu, i);
    const Eigen::MatrixXd pg = l.Pu.middleRows(l.grad_index(i, 0, 0), nc * 2);
    energy += c.area * pg.transpose() * l.stress[i] * pg;
    for (int side = 0; side < 2; ++side) {
      const int lf = c.faces[side];
      const RegionFace& f = r.faces[lf];
      const double d = c.distances[side];
      const Eigen::MatrixXd t = l.Su.middleRows(l.traction_row(i, side), nc);
      const Eigen::MatrixXd diff = m.average[lf] - ek;
      form += t.transpose() * diff;
      nd += (c.area / (d * d)) * diff.transpose() * diff;
      if (!f.is_boundary()) {
        Eigen::MatrixXd jj = Eigen::MatrixXd::Zero(nu, nu);
        for (std::size_t b = 0; b < f.points.size(); ++b) jj += f.weights[b] * m.jump[lf][b].transpose() * m.jump[lf][b];
        jj *= c.area / (d * d) / f.length;
        jumps += jj;
        nd += jj;
      }
      // gamma_sigma u - u_K
      Eigen::MatrixXd g;
      if (f.tag == BoundaryTag::Dirichlet) {
        g = -ek;
      } else if (f.is_boundary()) {
        continue;
      } else {
        const int o = f.cells[0] == i ? 1 : 0;
        const int other = f.cells[o];
        const double d_other = r.cells[other].distances[f.sides[o]];
        const double wi = (1.0 / d) / (1.0 / d + 1.0 / d_other);
        g = wi * ek + (1.0 - wi) * unit_block(nc, nu, other) - ek;
      }
      nt += (f.length / d) * g.transpose() * g;
    }
  }
  const double scale = harmonic_scale(r, material, l.form.law);
  const Eigen::MatrixXd sym = 0.5 * (form + form.transpose());
  const Eigen::MatrixXd bnorm = energy + scale * jumps;

  const Eigen::MatrixXd q = complement(local_rigid_basis(r, nc), nu);
  if (q.cols() == 0) {
    a.empty_quotient = true;
  } else {
    const Eigen::MatrixXd aq = q.transpose() * sym * q;
    const Eigen::MatrixXd bq = q.transpose() * bnorm * q;
    const Eigen::MatrixXd eq = q.transpose() * energy * q;
    const Eigen::MatrixXd jq = scale * q.transpose() * jumps * q;
    const Pencil p2 = pencil(aq, bq);
    if (p2.values.size() == 0)
      a.empty_quotient = true;
    else
      a.theta2 = p2.values(0);
    // jumps that are round-off relative to the full norm are no jumps at all
    const Pencil pj = pencil(eq, jq, bq.cwiseAbs().maxCoeff());
    if (pj.values.size()) a.theta2_prime = pj.values(0);
    const Pencil pr = pencil(jq, bq);
    if (pr.values.size()) a.jump_ratio = std::max(0.0, pr.values(pr.values.size() - 1));
  }

  const Pencil p1 = pencil(nd, nt);
  if (p1.values.size()) a.theta1 = std::sqrt(std::max(0.0, p1.values(p1.values.size() - 1)));
  if (p1.null_b.cols() > 0) {
    const double hidden = (p1.null_b.transpose() * nd * p1.null_b).norm();
    if (hidden > 1e-10 * std::max(nd.norm(), 1e-300)) a.theta1 = kInf;
  }
  return a;
}

Eigen::MatrixXd t_gram_matrix(const Mesh& mesh, int nc) {
  const int n = mesh.num_cells();
  Eigen::MatrixXd cells = Eigen::MatrixXd::Zero(n, n);
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const Face& face = mesh.face(f);
    const Vec2 a = mesh.vertex(face.vertices[0]);
    const Vec2 b = mesh.vertex(face.vertices[1]);
    const Vec2 n_unit = Vec2(b.y() - a.y(), a.x() - b.x()).normalized();
    const Vec2 mid = 0.5 * (a + b);
    const double len = (b - a).norm();
    auto dist = [&](int k) { return std::abs((mid - mesh.center(k)).dot(n_unit)); };
    if (face.is_boundary()) {
      if (face.tag != BoundaryTag::Dirichlet) continue;
      const int k = face.cells[0];
      cells(k, k) += len / dist(k);
      continue;
    }
    const int k0 = face.cells[0], k1 = face.cells[1];
    const double d0 = dist(k0), d1 = dist(k1);
    const double w0 = (1.0 / d0) / (1.0 / d0 + 1.0 / d1);
    const double w1 = 1.0 - w0;
    // (gamma - u_k0) = w1 (u_k1 - u_k0), (gamma - u_k1) = w0 (u_k0 - u_k1)
    const double c = len / d0 * w1 * w1 + len / d1 * w0 * w0;
    cells(k0, k0) += c;
    cells(k1, k1) += c;
    cells(k0, k1) -= c;
    cells(k1, k0) -= c;
  }
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n * nc, n * nc);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (cells(i, j) != 0.0)
        for (int c = 0; c < nc; ++c) g(i * nc + c, j * nc + c) = cells(i, j);
  return g;
}

GlobalCoercivity estimate_global_coercivity(const Discretization& disc, int max_unknowns) {
  GlobalCoercivity out;
  const Mesh& mesh = *disc.mesh;
  const int nc = disc.ncomp();
  const int n = mesh.num_cells() * nc;
  if (n > max_unknowns) {
    out.status = fmt::format("skipped: {} unknowns exceed the dense limit {}", n, max_unknowns);
    return out;
  }
  try {
    const GlobalSystem sys = assemble(disc, ProblemData::homogeneous(nc));
    const Eigen::MatrixXd a = Eigen::MatrixXd(sys.A);
    const Eigen::MatrixXd sym = 0.5 * (a + a.transpose());
    const Eigen::MatrixXd gram = t_gram_matrix(mesh, nc);
    Eigen::MatrixXd q = Eigen::MatrixXd::Identity(n, n);
    if (sys.pure_neumann) q = complement(rigid_basis(mesh, nc, false), n);
    const Pencil p = pencil(q.transpose() * sym * q, q.transpose() * gram * q);
    if (p.values.size() == 0) {
      out.status = "unavailable: the |.|_T Gram matrix is zero on the quotient space";
      return out;
    }
    out.theta = p.values(0);
    out.status = "ok";
  } catch (const NumericalError& e) {
    out.status = fmt::format("unavailable: {}", e.what());
  }
  return out;
}

std::vector<int> block_partition(const Mesh& mesh, int nbx, int nby) {
  if (nbx < 1 || nby < 1) throw ConfigError("macro block counts must be positive");
  Vec2 lo = mesh.vertex(0), hi = mesh.vertex(0);
  for (const Vec2& v : mesh.vertices()) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  std::vector<int> part(mesh.num_cells());
  for (int k = 0; k < mesh.num_cells(); ++k) {
    const Vec2 t = (mesh.center(k) - lo).cwiseQuotient(hi - lo);
    const int bx = std::clamp(static_cast<int>(std::floor(t.x() * nbx)), 0, nbx - 1);
    const int by = std::clamp(static_cast<int>(std::floor(t.y() * nby)), 0, nby - 1);
    part[k] = by * nbx + bx;
  }
  return part;
}

CountingCheck check_locally_underconstrained(const Mesh& mesh, const std::vector<int>& partition, int d,
                                             int max_cells) {
  if (static_cast<int>(partition.size()) != mesh.num_cells())
    throw ConfigError(fmt::format("macro partition has {} entries for {} cells", partition.size(), mesh.num_cells()));
  std::map<int, std::vector<int>> macro;
  for (int k = 0; k < mesh.num_cells(); ++k) {
    if (partition[k] < 0) throw ConfigError(fmt::format("cell {} is not assigned to a macrocell", k));
    macro[partition[k]].push_back(k);
  }
  CountingCheck out;
  out.d = d;
  out.card_cells = mesh.num_cells();
  out.card_vertices = mesh.num_vertices();
  out.all = true;
  for (const auto& [id, cells] : macro) {
    if (static_cast<int>(cells.size()) > max_cells)
      throw ConfigError(fmt::format("macrocell {} has {} cells (limit {})", id, cells.size(), max_cells));
    std::set<int> verts;
    for (int k : cells)
      for (int v : mesh.cell_vertices(k)) verts.insert(v);
    const bool under = d * static_cast<int>(cells.size()) > static_cast<int>(verts.size());
    out.cells.push_back(static_cast<int>(cells.size()));
    out.vertices.push_back(static_cast<int>(verts.size()));
    out.underconstrained.push_back(under);
    out.all = out.all && under;
  }
  return out;
}

std::vector<int> load_partition(const std::string& path, int num_cells) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open partition file '{}'", path));
  std::vector<int> part;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      std::size_t used = 0;
      part.push_back(std::stoi(line, &used));
      if (line.find_first_not_of(" \t\r", used) != std::string::npos) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ConfigError(fmt::format("partition file '{}' line {}: expected one integer", path, lineno));
    }
  }
  if (static_cast<int>(part.size()) != num_cells)
    throw ConfigError(fmt::format("partition file '{}' has {} entries for {} cells", path, part.size(), num_cells));
  return part;
}

CoercivityReport audit(const Discretization& disc, const AuditOptions& options) {
  const Mesh& mesh = *disc.mesh;
  const int nv = mesh.num_vertices();
  CoercivityReport rep;
  rep.vertices.resize(nv);
  const int threads = std::clamp(options.threads, 1, std::max(1, nv));
  auto work = [&](int lo, int hi) {
    for (int s = lo; s < hi; ++s) rep.vertices[s] = audit_vertex(disc.locals[s], disc.material);
  };
  if (threads == 1) {
    work(0, nv);
  } else {
    // audit_vertex only throws on eigensolver failure; keep the lowest vertex's error.
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    const int chunk = (nv + threads - 1) / threads;
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&, t] {
        try {
          work(t * chunk, std::min(nv, (t + 1) * chunk));
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  for (const auto& a : rep.vertices) {
    if (!a.empty_quotient) rep.theta2 = std::min(rep.theta2, a.theta2);
    rep.theta1 = std::max(rep.theta1, a.theta1);
    rep.theta2_prime = std::min(rep.theta2_prime, a.theta2_prime);
  }
  rep.card_vertices = nv;
  rep.card_cells = mesh.num_cells();
  if (options.global)
    rep.global = estimate_global_coercivity(disc, options.global_max_unknowns);
  else
    rep.global.status = "skipped";
  return rep;
}

bool CoercivityReport::passed() const { return failed_vertices().empty(); }

std::vector<int> CoercivityReport::failed_vertices() const {
  std::vector<int> out;
  for (const auto& a : vertices)
    if (a.failed()) out.push_back(a.vertex);
  return out;
}

std::string CoercivityReport::to_json() const {
  using nlohmann::json;
  auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  json verts = json::array();
  for (const auto& a : vertices) {
    verts.push_back({{"vertex_id", a.vertex},
                     {"theta2", num(a.theta2)},
                     {"theta2_infinite", !std::isfinite(a.theta2)},
                     {"empty_quotient", a.empty_quotient},
                     {"theta2_prime", num(a.theta2_prime)},
                     {"jump_ratio", a.jump_ratio},
                     {"uncontrolled_jump", a.uncontrolled_jump()},
                     {"theta1", num(a.theta1)},
                     {"vertex_symmetric", a.vertex_symmetric},
                     {"s_eig_min", a.s_eig_min},
                     {"singular", a.singular},
                     {"failed", a.failed()}});
  }
  json summary = {{"theta2", num(theta2)},
                  {"theta1", num(theta1)},
                  {"theta2_prime", num(theta2_prime)},
                  {"global_theta", global.theta ? json(*global.theta) : json(nullptr)},
                  {"global_status", global.status},
                  {"card_vertices", card_vertices},
                  {"card_cells", card_cells},
                  {"d_card_cells", d * card_cells},
                  {"failed_vertices", failed_vertices()},
                  {"passed", passed()}};
  if (counting) {
    json blocks = json::array();
    for (std::size_t i = 0; i < counting->cells.size(); ++i)
      blocks.push_back({{"cells", counting->cells[i]},
                        {"vertices", counting->vertices[i]},
                        {"underconstrained", static_cast<bool>(counting->underconstrained[i])}});
    summary["locally_underconstrained"] = {{"all", counting->all}, {"macrocells", blocks}};
  }
  return json{{"vertices", verts}, {"summary", summary}}.dump(2);
}

}  // namespace mpsa
