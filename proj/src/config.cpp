#include "mpsa/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace mpsa {

namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s = {
      {"mesh", {"kind", "file", "nx", "ny", "perturbation", "seed", "lx", "ly"}},
      {"material", {"mu", "lambda", "nu", "file", "mu_min", "mu_max"}},
      {"variant", {"method", "eta", "force", "alpha"}},
      {"boundary", {"default", "neumann_box", "dirichlet_box"}},
      {"problem", {"case", "linear_a", "linear_b"}},
      {"solver", {"method", "tol", "max_iter", "threads", "compat_tol", "direct_limit"}},
      {"study", {"levels", "base_n", "nu", "n", "precheck"}},
      {"coercivity", {"global", "global_max_unknowns", "macro_block", "partition_file", "macro_max_cells"}},
      {"output", {"dir", "debug_local"}},
  };
  return s;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

[[noreturn]] void bad(const std::string& where, const std::string& value, const std::string& what) {
  throw ConfigError(fmt::format("{}: invalid value '{}' ({})", where, value, what));
}

double to_double(const std::string& where, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size() || !std::isfinite(d)) bad(where, v, "expected a finite number");
    return d;
  } catch (const std::logic_error&) {
    bad(where, v, "expected a number");
  }
}

long long to_integer(const std::string& where, const std::string& v) {
  try {
    std::size_t used = 0;
    const long long i = std::stoll(v, &used);
    if (used != v.size()) bad(where, v, "expected an integer");
    return i;
  } catch (const std::logic_error&) {
    bad(where, v, "expected an integer");
  }
}

int to_int(const std::string& where, const std::string& v) {
  const long long i = to_integer(where, v);
  if (i < std::numeric_limits<int>::min() || i > std::numeric_limits<int>::max()) bad(where, v, "out of range");
  return static_cast<int>(i);
}

bool to_bool(const std::string& where, const std::string& v) {
  std::string l = v;
  std::transform(l.begin(), l.end(), l.begin(), [](unsigned char c) { return std::tolower(c); });
  if (l == "true" || l == "yes" || l == "1" || l == "on") return true;
  if (l == "false" || l == "no" || l == "0" || l == "off") return false;
  bad(where, v, "expected true or false");
}

std::vector<double> to_list(const std::string& where, const std::string& v) {
  std::string s = v;
  std::replace(s.begin(), s.end(), ',', ' ');
  std::istringstream in(s);
  std::vector<double> out;
  std::string tok;
  while (in >> tok) out.push_back(to_double(where, tok));
  return out;
}

BoundaryTag to_tag(const std::string& where, const std::string& v) {
  if (v == "dirichlet" || v == "D") return BoundaryTag::Dirichlet;
  if (v == "neumann" || v == "N") return BoundaryTag::Neumann;
  bad(where, v, "expected dirichlet or neumann");
}

void add_boxes(RunConfig& c, const std::string& where, const std::string& v, BoundaryTag tag) {
  std::istringstream in(v);
  std::string item;
  while (std::getline(in, item, ';')) {
    if (trim(item).empty()) continue;
    const std::vector<double> b = to_list(where, item);
    if (b.size() != 4) bad(where, item, "a box is 'x0 y0 x1 y1'");
    BoxRule r{Vec2(std::min(b[0], b[2]), std::min(b[1], b[3])), Vec2(std::max(b[0], b[2]), std::max(b[1], b[3])), tag};
    c.boxes.push_back(r);
  }
}

void apply(RunConfig& c, const std::string& sec, const std::string& key, const std::string& v, bool& lambda_set) {
  const std::string where = fmt::format("[{}] {}", sec, key);
  if (sec == "mesh") {
    if (key == "kind") {
      c.mesh.kind = parse_mesh_kind(v);
    } else if (key == "file") {
      c.mesh_file = v;
    } else if (key == "nx") {
      c.mesh.nx = to_int(where, v);
    } else if (key == "ny") {
      c.mesh.ny = to_int(where, v);
    } else if (key == "perturbation") {
      c.mesh.perturbation = to_double(where, v);
    } else if (key == "seed") {
      const long long s = to_integer(where, v);
      if (s < 0) bad(where, v, "seed must be non-negative");
      c.mesh.seed = static_cast<std::uint64_t>(s);
    } else if (key == "lx") {
      c.mesh.lx = to_double(where, v);
    } else if (key == "ly") {
      c.mesh.ly = to_double(where, v);
    }
  } else if (sec == "material") {
    if (key == "mu") c.mu = to_double(where, v);
    if (key == "lambda") {
      c.lambda = to_double(where, v);
      lambda_set = true;
    }
    if (key == "nu") c.nu = to_double(where, v);
    if (key == "file") c.material_file = v;
    if (key == "mu_min") c.mu_min = to_double(where, v);
    if (key == "mu_max") c.mu_max = to_double(where, v);
  } else if (sec == "variant") {
    if (key == "method") c.variant.method = parse_method(v);
    if (key == "eta") c.variant.eta = to_double(where, v);
    if (key == "force") c.variant.force = to_bool(where, v);
    if (key == "alpha") c.variant.alpha = to_double(where, v);
  } else if (sec == "boundary") {
    if (key == "default") c.default_tag = to_tag(where, v);
    if (key == "neumann_box") add_boxes(c, where, v, BoundaryTag::Neumann);
    if (key == "dirichlet_box") add_boxes(c, where, v, BoundaryTag::Dirichlet);
  } else if (sec == "problem") {
    if (key == "case") c.case_name = v;
    if (key == "linear_a") {
      const auto a = to_list(where, v);
      if (a.size() != 4) bad(where, v, "expected 4 entries a11 a12 a21 a22");
      c.linear.a << a[0], a[1], a[2], a[3];
    }
    if (key == "linear_b") {
      const auto b = to_list(where, v);
      if (b.size() != 2) bad(where, v, "expected 2 entries");
      c.linear.b << b[0], b[1];
    }
  } else if (sec == "solver") {
    if (key == "method") c.solver.method = parse_solver_method(v);
    if (key == "tol") c.solver.tol = to_double(where, v);
    if (key == "max_iter") c.solver.max_iter = to_int(where, v);
    if (key == "threads") c.threads = to_int(where, v);
    if (key == "compat_tol") c.solver.compat_tol = to_double(where, v);
    if (key == "direct_limit") c.solver.direct_limit = to_int(where, v);
  } else if (sec == "study") {
    if (key == "levels") c.levels = to_int(where, v);
    if (key == "base_n") c.base_n = to_int(where, v);
    if (key == "nu") c.nus = to_list(where, v);
    if (key == "n") c.n = to_int(where, v);
    if (key == "precheck") c.precheck = to_bool(where, v);
  } else if (sec == "coercivity") {
    if (key == "global") c.global = to_bool(where, v);
    if (key == "global_max_unknowns") c.global_max_unknowns = to_int(where, v);
    if (key == "macro_block") c.macro_block = to_int(where, v);
    if (key == "partition_file") c.partition_file = v;
    if (key == "macro_max_cells") c.macro_max_cells = to_int(where, v);
  } else if (sec == "output") {
    if (key == "dir") c.dir = v;
    if (key == "debug_local") c.debug_local = to_bool(where, v);
  }
}

void check(RunConfig& c) {
  if (c.nu) {
    if (!(*c.nu >= 0.0 && *c.nu < 0.5)) throw ConfigError(fmt::format("[material] nu must lie in [0, 0.5) (got {})", *c.nu));
    c.lambda = 2.0 * c.mu * *c.nu / (1.0 - 2.0 * *c.nu);
  }
  if (!(c.mu > 0.0)) throw ConfigError("[material] mu must be positive");
  if (c.lambda < 0.0) throw ConfigError("[material] lambda must be non-negative");
  if (!(c.solver.tol > 0.0)) throw ConfigError("[solver] tol must be positive");
  if (c.solver.max_iter < 1) throw ConfigError("[solver] max_iter must be positive");
  if (c.threads < 1) throw ConfigError("[solver] threads must be at least 1");
  if (c.levels < 1 || c.base_n < 1 || c.n < 1) throw ConfigError("[study] levels, base_n and n must be positive");
  if (c.macro_block < 1) throw ConfigError("[coercivity] macro_block must be positive");
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(fmt::format("config parse error at line {}: {}", e.line(), e.message()));
  }
  RunConfig c;
  bool lambda_set = false;
  for (const auto& [sec, body] : tree) {
    if (body.empty()) throw ConfigError(fmt::format("config key '{}' outside of a section", sec));
    const auto it = schema().find(sec);
    if (it == schema().end()) throw ConfigError(fmt::format("unknown config section [{}]", sec));
    for (const auto& [key, value] : body) {
      if (!it->second.count(key)) throw ConfigError(fmt::format("unknown config key '{}' in section [{}]", key, sec));
      apply(c, sec, key, trim(value.data()), lambda_set);
    }
  }
  if (lambda_set && c.nu) throw ConfigError("[material] set either lambda or nu, not both");
  check(c);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError(fmt::format("cannot open config file '{}'", path));
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

Tagger make_tagger(const RunConfig& c, const Mesh* mesh) {
  double diag = std::hypot(c.mesh.lx, c.mesh.ly);
  if (mesh && mesh->num_vertices()) {
    Vec2 lo = mesh->vertex(0), hi = mesh->vertex(0);
    for (const Vec2& v : mesh->vertices()) {
      lo = lo.cwiseMin(v);
      hi = hi.cwiseMax(v);
    }
    diag = (hi - lo).norm();
  }
  const double tol = 1e-9 * diag;
  return [boxes = c.boxes, def = c.default_tag, tol, mesh](int f, const Vec2& mid) {
    BoundaryTag tag = def;
    if (mesh && mesh->face(f).tag != BoundaryTag::Unset) tag = mesh->face(f).tag;
    for (const auto& b : boxes)
      if ((mid.array() >= b.lo.array() - tol).all() && (mid.array() <= b.hi.array() + tol).all()) tag = b.tag;
    return tag;
  };
}

Mesh build_mesh(const RunConfig& c) {
  if (c.mesh_file) {
    const Mesh base = load_mesh(*c.mesh_file);
    return base.retagged(make_tagger(c, &base));
  }
  // generated meshes come tagged Dirichlet; the rules decide instead
  const Mesh base = generate_mesh(c.mesh);
  return base.retagged(make_tagger(c));
}

MaterialField build_material(const RunConfig& c, const Mesh& mesh) {
  MaterialField m = c.material_file ? MaterialField::load(*c.material_file, mesh.num_cells())
                                    : MaterialField::constant(mesh.num_cells(), c.mu, c.lambda);
  m.validate(mesh.num_cells(), c.mu_min, c.mu_max);
  return m;
}

std::string RunConfig::to_json() const {
  using nlohmann::json;
  json j;
  j["mesh"] = {{"kind", to_string(mesh.kind)},
               {"file", mesh_file ? json(*mesh_file) : json(nullptr)},
               {"nx", mesh.nx},
               {"ny", mesh.ny},
               {"perturbation", mesh.perturbation},
               {"seed", mesh.seed},
               {"lx", mesh.lx},
               {"ly", mesh.ly}};
  j["material"] = {{"mu", mu},
                   {"lambda", lambda},
                   {"nu", nu ? json(*nu) : json(nullptr)},
                   {"file", material_file ? json(*material_file) : json(nullptr)},
                   {"mu_min", mu_min},
                   {"mu_max", mu_max}};
  j["variant"] = {{"method", to_string(variant.method)},
                  {"eta", variant.eta},
                  {"force", variant.force},
                  {"alpha", variant.alpha ? json(*variant.alpha) : json(nullptr)}};
  json box_list = json::array();
  for (const auto& b : boxes)
    box_list.push_back({{"tag", std::string(1, tag_char(b.tag))},
                     {"lo", {b.lo.x(), b.lo.y()}},
                     {"hi", {b.hi.x(), b.hi.y()}}});
  j["boundary"] = {{"default", std::string(1, tag_char(default_tag))}, {"boxes", box_list}};
  j["problem"] = {{"case", case_name},
                  {"linear_a", {linear.a(0, 0), linear.a(0, 1), linear.a(1, 0), linear.a(1, 1)}},
                  {"linear_b", {linear.b.x(), linear.b.y()}}};
  j["solver"] = {{"method", to_string(solver.method)},
                 {"tol", solver.tol},
                 {"max_iter", solver.max_iter},
                 {"threads", threads},
                 {"compat_tol", solver.compat_tol},
                 {"direct_limit", solver.direct_limit}};
  j["study"] = {{"levels", levels}, {"base_n", base_n}, {"nu", nus}, {"n", n}, {"precheck", precheck}};
  j["coercivity"] = {{"global", global},
                     {"global_max_unknowns", global_max_unknowns},
                     {"macro_block", macro_block},
                     {"partition_file", partition_file ? json(*partition_file) : json(nullptr)},
                     {"macro_max_cells", macro_max_cells}};
  j["output"] = {{"dir", dir}, {"debug_local", debug_local}};
  return j.dump(2);
}

}  // namespace mpsa
