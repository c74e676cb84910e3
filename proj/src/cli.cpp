#include "mpsa/cli.hpp"

#include "mpsa/config.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace mpsa::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Args {
  std::string config;
  std::string out;
  int threads = 0;
  bool debug_local = false;
};

RunConfig resolve(const Args& a) {
  RunConfig c = load_config(a.config);
  if (!a.out.empty()) c.dir = a.out;
  if (a.threads > 0) c.threads = a.threads;
  if (a.debug_local) c.debug_local = true;
  std::error_code ec;
  fs::create_directories(c.dir, ec);
  if (ec) throw ConfigError(fmt::format("cannot create output directory '{}': {}", c.dir, ec.message()));
  return c;
}

std::string path_in(const RunConfig& c, const std::string& name) { return (fs::path(c.dir) / name).string(); }

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw ConfigError(fmt::format("cannot write '{}'", path));
  f << text;
}

void write_manifest(const RunConfig& c, const std::string& command, const json& results) {
  json m;
  m["command"] = command;
  m["config"] = json::parse(c.to_json());
  m["results"] = results;
  write_text(path_in(c, "manifest.json"), m.dump(2) + "\n");
}

json mesh_summary(const Mesh& mesh) {
  int nd = 0, nn = 0;
  for (int f = 0; f < mesh.num_faces(); ++f) {
    if (mesh.face(f).tag == BoundaryTag::Dirichlet) ++nd;
    if (mesh.face(f).tag == BoundaryTag::Neumann) ++nn;
  }
  return {{"cells", mesh.num_cells()},
          {"faces", mesh.num_faces()},
          {"vertices", mesh.num_vertices()},
          {"dirichlet_faces", nd},
          {"neumann_faces", nn},
          {"h", mesh.h()}};
}

void write_local_debug(const RunConfig& c, const Discretization& disc) {
  std::ofstream f(path_in(c, "local_debug.json"));
  if (!f) throw ConfigError("cannot write local_debug.json");
  f << "[\n";
  for (std::size_t s = 0; s < disc.locals.size(); ++s)
    f << local_debug_json(disc.locals[s]) << (s + 1 < disc.locals.size() ? ",\n" : "\n");
  f << "]\n";
}

StudyOptions study_options(const RunConfig& c) {
  StudyOptions o;
  o.mesh = c.mesh;
  o.base_n = c.base_n;
  o.levels = c.levels;
  o.variant = c.variant;
  o.case_name = c.case_name;
  o.mu = c.mu;
  o.lambda = c.lambda;
  o.linear = c.linear;
  o.solver = c.solver;
  o.threads = c.threads;
  o.precheck = c.precheck;
  o.tagger = make_tagger(c);
  return o;
}

int cmd_solve(const Args& a, std::ostream& out, std::ostream& err) {
  const RunConfig c = resolve(a);
  const Mesh mesh = build_mesh(c);
  const MaterialField material = build_material(c, mesh);
  const ManufacturedCase mc = make_case(c.case_name, c.mu, c.lambda, c.linear);
  if (mc.ncomp != c.variant.ncomp())
    throw ConfigError(fmt::format("case '{}' does not match method '{}'", mc.name, to_string(c.variant.method)));
  if (c.material_file && mc.name != "linear" && mc.name != "scalar_linear")
    fmt::print(err, "warning: case '{}' derives its load from [material] mu/lambda, not the material file\n", mc.name);
  const Formulation form = make_formulation(c.variant, mesh, material);
  const Discretization disc = discretize(mesh, material, form, c.threads);
  if (c.debug_local) write_local_debug(c, disc);
  const GlobalSystem sys = assemble(disc, mc.problem());
  const SolveResult res = solve(sys, mesh, c.solver);
  const TractionTable tt = recover_tractions(disc, sys, res.u);
  const std::vector<double> balance = force_balance_residual(mesh, tt, sys);

  write_solution_csv(path_in(c, "solution.csv"), mesh, res.u);
  write_traction_csv(path_in(c, "traction.csv"), mesh, tt);

  double max_err = 0.0;
  for (int k = 0; k < mesh.num_cells(); ++k)
    max_err = std::max(max_err, (res.u.at(k) - mc.u(mesh.center(k))).cwiseAbs().maxCoeff());
  const ErrorNorms e = measure_errors(disc, sys, res.u, mc.exact());
  const double max_balance = balance.empty() ? 0.0 : *std::max_element(balance.begin(), balance.end());
  json r = {{"mesh", mesh_summary(mesh)},
            {"solver", res.method},
            {"iterations", res.iterations},
            {"residual", res.residual},
            {"nullspace_projected", res.nullspace_projected},
            {"nullspace_correction", res.nullspace_correction},
            {"symmetry_defect", symmetry_defect(sys.A)},
            {"max_force_balance_residual", max_balance},
            {"max_center_error", max_err},
            {"err_l2_u", e.l2_u},
            {"err_T_u", e.t_u},
            {"err_stress", e.stress}};
  write_manifest(c, "solve", r);
  fmt::print(out, "solve: {} cells, solver {} ({} iterations, residual {:.3e})\n", mesh.num_cells(), res.method,
             res.iterations, res.residual);
  fmt::print(out, "max cell-center error {:.3e}, L2 error {:.3e}, max force balance residual {:.3e}\n", max_err, e.l2_u,
             max_balance);
  return kExitOk;
}

int cmd_coercivity(const Args& a, std::ostream& out, std::ostream&) {
  const RunConfig c = resolve(a);
  const Mesh mesh = build_mesh(c);
  const MaterialField material = build_material(c, mesh);
  const Formulation form = make_formulation(c.variant, mesh, material);
  const Discretization disc = discretize(mesh, material, form, c.threads);
  if (c.debug_local) write_local_debug(c, disc);
  AuditOptions ao;
  ao.global = c.global;
  ao.global_max_unknowns = c.global_max_unknowns;
  ao.threads = c.threads;
  CoercivityReport rep = audit(disc, ao);
  if (c.partition_file) {
    rep.counting = check_locally_underconstrained(mesh, load_partition(*c.partition_file, mesh.num_cells()), 2,
                                                  c.macro_max_cells);
  } else if (!c.mesh_file) {
    const int bx = std::max(1, c.mesh.nx / c.macro_block), by = std::max(1, c.mesh.ny / c.macro_block);
    rep.counting = check_locally_underconstrained(mesh, block_partition(mesh, bx, by), 2, c.macro_max_cells);
  }
  write_text(path_in(c, "coercivity.json"), rep.to_json() + "\n");
  const auto failed = rep.failed_vertices();
  json r = {{"mesh", mesh_summary(mesh)},
            {"theta2", std::isfinite(rep.theta2) ? json(rep.theta2) : json(nullptr)},
            {"theta1", std::isfinite(rep.theta1) ? json(rep.theta1) : json(nullptr)},
            {"global_theta", rep.global.theta ? json(*rep.global.theta) : json(nullptr)},
            {"global_status", rep.global.status},
            {"failed_vertices", failed.size()},
            {"passed", rep.passed()}};
  write_manifest(c, "coercivity", r);
  fmt::print(out, "coercivity: min theta2 {:.6g}, max theta1 {:.6g}, global {}\n", rep.theta2, rep.theta1,
             rep.global.theta ? fmt::format("{:.6g}", *rep.global.theta) : rep.global.status);
  if (rep.counting)
    fmt::print(out, "counting: card(V) = {}, d card(T) = {}, locally underconstrained: {}\n", rep.card_vertices,
               2 * rep.card_cells, rep.counting->all ? "yes" : "no");
  if (!failed.empty()) {
    const VertexAudit& v = rep.vertices[failed.front()];
    fmt::print(out, "audit FAILED at {} vertices (first: vertex {}, theta2 {:.3e}, theta2' {:.3e})\n", failed.size(),
               v.vertex, v.theta2, v.theta2_prime);
    return kExitAudit;
  }
  fmt::print(out, "audit passed\n");
  return kExitOk;
}

json table_json(const ErrorTable& t) {
  json rows = json::array();
  for (const auto& r : t.rows) rows.push_back({{"level", r.level}, {"flagged", r.flagged}});
  return rows;
}

int cmd_convergence(const Args& a, std::ostream& out, std::ostream&) {
  const RunConfig c = resolve(a);
  if (c.mesh_file) throw ConfigError("convergence studies need a generated mesh family, not [mesh] file");
  const ErrorTable t = convergence_study(study_options(c));
  t.write_csv(path_in(c, "convergence.csv"));
  write_manifest(c, "convergence", {{"levels", table_json(t)}});
  out << t.to_csv();
  return kExitOk;
}

int cmd_locking(const Args& a, std::ostream& out, std::ostream&) {
  const RunConfig c = resolve(a);
  if (c.mesh_file) throw ConfigError("locking studies need a generated mesh, not [mesh] file");
  LockingOptions o;
  o.study = study_options(c);
  o.study.case_name = c.case_name;
  o.nus = c.nus;
  o.n = c.n;
  o.macro_block = c.macro_block;
  const ErrorTable t = locking_study(o);
  t.write_csv(path_in(c, "locking.csv"));
  json r = {{"levels", table_json(t)}};
  if (t.counting)
    r["counting"] = {{"card_vertices", t.counting->card_vertices},
                     {"card_cells", t.counting->card_cells},
                     {"d_card_cells", 2 * t.counting->card_cells},
                     {"locally_underconstrained", t.counting->all}};
  write_manifest(c, "locking", r);
  out << t.to_csv();
  if (t.counting)
    fmt::print(out, "counting: card(V) = {}, d card(T) = {}, locally underconstrained: {}\n",
               t.counting->card_vertices, 2 * t.counting->card_cells, t.counting->all ? "yes" : "no");
  return kExitOk;
}

int cmd_meshgen(const Args& a, std::ostream& out, std::ostream&) {
  const RunConfig c = resolve(a);
  const Mesh mesh = build_mesh(c);
  const std::string path = path_in(c, "mesh.txt");
  save_mesh(mesh, path);
  write_manifest(c, "meshgen", {{"mesh", mesh_summary(mesh)}, {"file", path}});
  fmt::print(out, "wrote {} ({} cells, {} vertices)\n", path, mesh.num_cells(), mesh.num_vertices());
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cell-centered MPSA finite volume solver for 2D linear elasticity"};
  app.require_subcommand(1);
  Args a;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"solve", "solve a manufactured problem and write solution/traction CSV"},
      {"coercivity", "audit the local coercivity conditions and write coercivity.json"},
      {"convergence", "refinement study, writes convergence.csv"},
      {"locking", "Poisson ratio sweep at fixed h, writes locking.csv"},
      {"meshgen", "generate a mesh and write it in the text format"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("config", a.config, "INI configuration file")->required();
    sub->add_option("-o,--out", a.out, "output directory (overrides [output] dir)");
    sub->add_option("-t,--threads", a.threads, "worker threads (overrides [solver] threads)");
    sub->add_flag("--debug-local", a.debug_local, "dump per-vertex local matrices to local_debug.json");
  }
  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitConfig;
  }
  const std::string cmd = app.get_subcommands().front()->get_name();
  try {
    if (cmd == "solve") return cmd_solve(a, out, err);
    if (cmd == "coercivity") return cmd_coercivity(a, out, err);
    if (cmd == "convergence") return cmd_convergence(a, out, err);
    if (cmd == "locking") return cmd_locking(a, out, err);
    return cmd_meshgen(a, out, err);
  } catch (const ConfigError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitNumerical;
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace mpsa::cli
