#include "mpsa/studies.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>

namespace mpsa {

double observed_rate(double e0, double e1, double h0, double h1) {
  if (!(e0 > 0.0) || !(e1 > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return std::log(e0 / e1) / std::log(h0 / h1);
}

CaseRun run_case(const Mesh& mesh, const ManufacturedCase& mc, const VariantConfig& variant,
                 const SolverOptions& solver, int threads, bool precheck) {
  if (variant.ncomp() != mc.ncomp)
    throw ConfigError(fmt::format("case '{}' has {} component(s) but method '{}' expects {}", mc.name, mc.ncomp,
                                  to_string(variant.method), variant.ncomp()));
  CaseRun run;
  const MaterialField material = MaterialField::constant(mesh.num_cells(), mc.mu, mc.lambda);
  const Formulation form = make_formulation(variant, mesh, material);
  run.disc = discretize(mesh, material, form, threads);
  // the finite difference variant carries no local coercivity requirement
  if (precheck && variant.method != Method::FdSymmetric) {
    AuditOptions ao;
    ao.global = false;
    ao.threads = threads;
    run.flagged = !audit(run.disc, ao).passed();
  }
  run.sys = assemble(run.disc, mc.problem());
  run.result = solve(run.sys, mesh, solver);
  run.err = measure_errors(run.disc, run.sys, run.result.u, mc.exact());
  return run;
}

namespace {

Mesh level_mesh(const StudyOptions& o, int n) {
  MeshSpec spec = o.mesh;
  spec.nx = n;
  spec.ny = n;
  Mesh mesh = generate_mesh(spec);
  if (o.tagger) mesh = mesh.retagged(o.tagger);
  return mesh;
}

}  // namespace

ErrorTable convergence_study(const StudyOptions& o) {
  if (o.levels < 1 || o.base_n < 1) throw ConfigError("levels and base_n must be positive");
  const ManufacturedCase mc = make_case(o.case_name, o.mu, o.lambda, o.linear);
  ErrorTable table;
  for (int level = 0; level < o.levels; ++level) {
    const int n = o.base_n << level;
    const Mesh mesh = level_mesh(o, n);
    const CaseRun run = run_case(mesh, mc, o.variant, o.solver, o.threads, o.precheck);
    StudyRow row;
    row.level = level;
    row.h = o.mesh.lx / n;
    row.err = run.err;
    row.flagged = run.flagged;
    if (level > 0) {
      const StudyRow& prev = table.rows.back();
      row.rate_l2 = observed_rate(prev.err.l2_u, row.err.l2_u, prev.h, row.h);
      row.rate_stress = observed_rate(prev.err.stress, row.err.stress, prev.h, row.h);
    }
    table.rows.push_back(row);
  }
  return table;
}

ErrorTable locking_study(const LockingOptions& o) {
  if (o.nus.empty()) throw ConfigError("locking study needs at least one Poisson ratio");
  const StudyOptions& so = o.study;
  {
    // the sweep only means something if the exact field stays put as lambda grows
    const ManufacturedCase probe = make_case(so.case_name, so.mu, 1.0, so.linear);
    double div = probe.ncomp == 2 ? 0.0 : 1.0, scale = 1e-300;
    for (int i = 0; i <= 10 && probe.ncomp == 2; ++i)
      for (int j = 0; j <= 10; ++j) {
        const Eigen::MatrixXd g = probe.grad(Vec2(so.mesh.lx * i / 10.0, so.mesh.ly * j / 10.0));
        div = std::max(div, std::abs(g.trace()));
        scale = std::max(scale, g.cwiseAbs().maxCoeff());
      }
    if (div > 1e-10 * scale)
      throw ConfigError(fmt::format("locking study needs a divergence-free vector case, '{}' is not", so.case_name));
  }
  const Mesh mesh = level_mesh(so, o.n);
  ErrorTable table;
  table.locking = true;
  const int blocks = std::max(1, o.n / std::max(1, o.macro_block));
  table.counting = check_locally_underconstrained(mesh, block_partition(mesh, blocks, blocks), 2,
                                                  4 * o.macro_block * o.macro_block);
  int level = 0;
  for (double nu : o.nus) {
    if (!(nu >= 0.0 && nu < 0.5)) throw ConfigError(fmt::format("Poisson ratio {} outside [0, 0.5)", nu));
    const double lambda = 2.0 * so.mu * nu / (1.0 - 2.0 * nu);
    const ManufacturedCase mc = make_case(so.case_name, so.mu, lambda, so.linear);
    const CaseRun run = run_case(mesh, mc, so.variant, so.solver, so.threads, so.precheck);
    StudyRow row;
    row.level = level++;
    row.h = so.mesh.lx / o.n;
    row.err = run.err;
    row.flagged = run.flagged;
    row.nu = nu;
    table.rows.push_back(row);
  }
  return table;
}

std::string ErrorTable::to_csv() const {
  auto num = [](double v) { return std::isnan(v) ? std::string() : fmt::format("{:.17g}", v); };
  std::string out = "level,h,err_l2_u,err_T_u,err_stress,rate_l2,rate_stress,flagged";
  out += locking ? ",nu,max_div\n" : "\n";
  for (const auto& r : rows) {
    out += fmt::format("{},{},{},{},{},{},{},{}", r.level, num(r.h), num(r.err.l2_u), num(r.err.t_u),
                       num(r.err.stress), num(r.rate_l2), num(r.rate_stress), r.flagged ? 1 : 0);
    if (locking) out += fmt::format(",{},{}", num(r.nu), num(r.err.max_div));
    out += "\n";
  }
  return out;
}

void ErrorTable::write_csv(const std::string& path) const {
  std::ofstream f(path);
  if (!f) throw ConfigError(fmt::format("cannot write '{}'", path));
  f << to_csv();
}

}  // namespace mpsa
