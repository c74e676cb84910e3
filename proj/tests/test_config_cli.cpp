#include "mpsa/cli.hpp"
#include "mpsa/config.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace mpsa;
namespace fs = std::filesystem;

namespace {

const std::string kConfigs = MPSA_CONFIG_DIR;

struct Outcome {
  int code;
  std::string out, err;
};

Outcome run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("mpsa_cli_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

fs::path write_config(const std::string& name, const std::string& text) {
  const fs::path p = fs::temp_directory_path() / ("mpsa_cfg_" + name + ".ini");
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST(Config, Defaults) {
  const RunConfig c = parse_config("");
  EXPECT_EQ(c.mesh.kind, MeshKind::Cartesian);
  EXPECT_EQ(c.variant.method, Method::MpsaFull);
  EXPECT_EQ(c.case_name, "trig");
}

TEST(Config, ParsesSections) {
  const RunConfig c = parse_config(
      "[mesh]\nkind = triangulated\nnx = 6\nny = 3\nperturbation = 0.1\n"
      "[material]\nmu = 2\nnu = 0.25\n"
      "[variant]\nmethod = mpsa_reduced\n"
      "[boundary]\ndefault = neumann\ndirichlet_box = 0 0 0.01 1; 0.99 0 1 1\n"
      "[study]\nnu = 0.3, 0.49\n");
  EXPECT_EQ(c.mesh.kind, MeshKind::Triangulated);
  EXPECT_EQ(c.mesh.nx, 6);
  EXPECT_EQ(c.mesh.ny, 3);
  EXPECT_DOUBLE_EQ(c.mu, 2.0);
  EXPECT_DOUBLE_EQ(c.lambda, 2.0);  // 2 mu nu / (1 - 2 nu)
  EXPECT_EQ(c.variant.method, Method::MpsaReduced);
  EXPECT_EQ(c.default_tag, BoundaryTag::Neumann);
  ASSERT_EQ(c.boxes.size(), 2u);
  EXPECT_EQ(c.nus, (std::vector<double>{0.3, 0.49}));
}

TEST(Config, BoxesRetagBoundary) {
  const RunConfig c = parse_config("[mesh]\nnx = 4\nny = 4\n[boundary]\ndefault = neumann\ndirichlet_box = -1 -1 0.001 2\n");
  const Mesh m = build_mesh(c);
  for (int f = 0; f < m.num_faces(); ++f) {
    if (!m.face(f).is_boundary()) continue;
    const bool left = m.face_midpoint(f).x() < 1e-12;
    EXPECT_EQ(m.face(f).tag, left ? BoundaryTag::Dirichlet : BoundaryTag::Neumann);
  }
}

TEST(Config, Rejections) {
  EXPECT_THROW(parse_config("[mesh]\ncolour = red\n"), ConfigError);
  EXPECT_THROW(parse_config("[meshes]\nnx = 2\n"), ConfigError);
  EXPECT_THROW(parse_config("nx = 2\n"), ConfigError);
  EXPECT_THROW(parse_config("[material]\nlambda = 1\nnu = 0.3\n"), ConfigError);
  EXPECT_THROW(parse_config("[material]\nnu = 0.5\n"), ConfigError);
  EXPECT_THROW(parse_config("[material]\nmu = -1\n"), ConfigError);
  EXPECT_THROW(parse_config("[mesh]\nnx = two\n"), ConfigError);
  EXPECT_THROW(parse_config("[mesh]\nkind = voronoi\n"), ConfigError);
  EXPECT_THROW(parse_config("[boundary]\nneumann_box = 0 0 1\n"), ConfigError);
  EXPECT_THROW(parse_config("[variant]\nmethod = mpsa_o2\n"), ConfigError);
  try {
    parse_config("[solver]\nthreads = 2\ntolerance = 1e-9\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("tolerance"), std::string::npos);
  }
}

TEST(Config, ShippedConfigsParse) {
  for (const auto& entry : fs::directory_iterator(kConfigs))
    if (entry.path().extension() == ".ini") EXPECT_NO_THROW(load_config(entry.path().string())) << entry.path();
}

TEST(Cli, PatchSolveIsExact) {
  const fs::path out = scratch("patch");
  const Outcome r = run_cli({"solve", kConfigs + "/patch.ini", "-o", out.string()});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  const auto manifest = nlohmann::json::parse(slurp(out / "manifest.json"));
  EXPECT_EQ(manifest["command"], "solve");
  EXPECT_LE(manifest["results"]["max_center_error"].get<double>(), 1e-10);
  EXPECT_LE(manifest["results"]["max_force_balance_residual"].get<double>(), 1e-10);

  // the CSV agrees with the affine field at the centers
  std::ifstream csv(out / "solution.csv");
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "cell_id,x,y,ux,uy");
  int rows = 0;
  while (std::getline(csv, line)) {
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream in(line);
    int id;
    double x, y, ux, uy;
    in >> id >> x >> y >> ux >> uy;
    EXPECT_NEAR(ux, 1.0 * x + 0.5 * y + 0.1, 1e-10);
    EXPECT_NEAR(uy, -0.25 * x + 2.0 * y - 0.2, 1e-10);
    ++rows;
  }
  EXPECT_EQ(rows, 64);
  EXPECT_TRUE(fs::exists(out / "traction.csv"));
}

TEST(Cli, ReducedOnQuadsIsNumericalError) {
  const Outcome r = run_cli({"solve", kConfigs + "/reduced_on_quads.ini", "-o", scratch("reduced_quads").string()});
  EXPECT_EQ(r.code, cli::kExitNumerical);
  EXPECT_NE(r.err.find("local problem ill-posed"), std::string::npos) << r.err;
}

TEST(Cli, ConfigErrors) {
  EXPECT_EQ(run_cli({"solve", "/nonexistent/config.ini"}).code, cli::kExitConfig);
  const fs::path missing_mesh = write_config("missing_mesh", "[mesh]\nfile = /nonexistent/mesh.txt\n");
  const Outcome r = run_cli({"solve", missing_mesh.string(), "-o", scratch("missing_mesh").string()});
  EXPECT_EQ(r.code, cli::kExitConfig);
  EXPECT_FALSE(r.err.empty());
  EXPECT_EQ(run_cli({"frobnicate", "x.ini"}).code, cli::kExitConfig);
  EXPECT_EQ(run_cli({}).code, cli::kExitConfig);
  const fs::path mismatch = write_config("mismatch", "[variant]\nmethod = scalar_mpfa\n[problem]\ncase = trig\n");
  EXPECT_EQ(run_cli({"solve", mismatch.string(), "-o", scratch("mismatch").string()}).code, cli::kExitConfig);
}

TEST(Cli, CoercivityVerdicts) {
  const fs::path cart = scratch("coer_cart");
  const Outcome a = run_cli({"coercivity", kConfigs + "/coercivity_cartesian.ini", "-o", cart.string()});
  EXPECT_EQ(a.code, cli::kExitOk) << a.out << a.err;
  const auto report = nlohmann::json::parse(slurp(cart / "coercivity.json"));
  EXPECT_TRUE(report["summary"]["passed"].get<bool>());
  EXPECT_EQ(report["vertices"].size(), 81u);

  const Outcome b = run_cli({"coercivity", kConfigs + "/coercivity_equilateral.ini", "-o", scratch("coer_eq").string()});
  EXPECT_EQ(b.code, cli::kExitAudit);
  EXPECT_NE(b.out.find("FAILED"), std::string::npos);

  const Outcome c =
      run_cli({"coercivity", kConfigs + "/coercivity_reduced_triangles.ini", "-o", scratch("coer_red").string()});
  EXPECT_EQ(c.code, cli::kExitOk) << c.out << c.err;
  EXPECT_NE(c.out.find("locally underconstrained: yes"), std::string::npos);
}

TEST(Cli, MeshgenRoundTrip) {
  const fs::path out = scratch("meshgen");
  ASSERT_EQ(run_cli({"meshgen", kConfigs + "/meshgen.ini", "-o", out.string()}).code, cli::kExitOk);
  const Mesh m = load_mesh((out / "mesh.txt").string());
  EXPECT_EQ(m.num_cells(), build_mesh(load_config(kConfigs + "/meshgen.ini")).num_cells());
  // the written tags survive: solving from the file sees the same Neumann faces
  const fs::path cfg = write_config("from_file", "[mesh]\nfile = " + (out / "mesh.txt").string() +
                                                     "\n[problem]\ncase = linear\n");
  const fs::path solved = scratch("from_file");
  const Outcome r = run_cli({"solve", cfg.string(), "-o", solved.string()});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  const auto a = nlohmann::json::parse(slurp(out / "manifest.json"))["results"]["mesh"];
  const auto b = nlohmann::json::parse(slurp(solved / "manifest.json"))["results"]["mesh"];
  EXPECT_EQ(a["neumann_faces"], b["neumann_faces"]);
  EXPECT_GT(a["neumann_faces"].get<int>(), 0);
}

TEST(Cli, DeterministicOutput) {
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  const std::string cfg = kConfigs + "/coercivity_reduced_triangles.ini";
  ASSERT_EQ(run_cli({"coercivity", cfg, "-o", a.string(), "-t", "1"}).code, cli::kExitOk);
  ASSERT_EQ(run_cli({"coercivity", cfg, "-o", b.string(), "-t", "4"}).code, cli::kExitOk);
  EXPECT_EQ(slurp(a / "coercivity.json"), slurp(b / "coercivity.json"));

  const fs::path s1 = scratch("det_s1"), s2 = scratch("det_s2");
  ASSERT_EQ(run_cli({"solve", kConfigs + "/patch.ini", "-o", s1.string()}).code, cli::kExitOk);
  ASSERT_EQ(run_cli({"solve", kConfigs + "/patch.ini", "-o", s2.string()}).code, cli::kExitOk);
  EXPECT_EQ(slurp(s1 / "solution.csv"), slurp(s2 / "solution.csv"));
  EXPECT_EQ(slurp(s1 / "traction.csv"), slurp(s2 / "traction.csv"));
}

TEST(Cli, DebugLocalDump) {
  const fs::path out = scratch("debug");
  const fs::path cfg = write_config("debug", "[mesh]\nnx = 2\nny = 2\n[problem]\ncase = linear\n");
  ASSERT_EQ(run_cli({"solve", cfg.string(), "-o", out.string(), "--debug-local"}).code, cli::kExitOk);
  const auto j = nlohmann::json::parse(slurp(out / "local_debug.json"));
  EXPECT_EQ(j.size(), 9u);
}
