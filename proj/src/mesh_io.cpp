#include "mpsa/mesh.hpp"

#include <fmt/format.h>

#include <fstream>
#include <sstream>

namespace mpsa {

namespace {

struct LineReader {
  std::istringstream in;
  int line_no = 0;

  explicit LineReader(const std::string& text) : in(text) {}

  // Next non-empty line with comments stripped, split into tokens.
  bool next(std::vector<std::string>& tokens) {
    std::string line;
    while (std::getline(in, line)) {
      ++line_no;
      if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
      std::istringstream ls(line);
      tokens.clear();
      for (std::string t; ls >> t;) tokens.push_back(t);
      if (!tokens.empty()) return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw MeshError(fmt::format("mesh parse error at line {}: {}", line_no, msg));
  }

  std::vector<std::string> expect_line(const char* what) {
    std::vector<std::string> t;
    if (!next(t)) fail(fmt::format("unexpected end of file, expected {}", what));
    return t;
  }

  long to_int(const std::string& s) const {
    std::size_t pos = 0;
    long v = 0;
    try {
      v = std::stol(s, &pos);
    } catch (const std::exception&) {
      fail(fmt::format("'{}' is not an integer", s));
    }
    if (pos != s.size()) fail(fmt::format("'{}' is not an integer", s));
    return v;
  }

  double to_double(const std::string& s) const {
    std::size_t pos = 0;
    double v = 0;
    try {
      v = std::stod(s, &pos);
    } catch (const std::exception&) {
      fail(fmt::format("'{}' is not a number", s));
    }
    if (pos != s.size()) fail(fmt::format("'{}' is not a number", s));
    return v;
  }

  int section_count(const char* keyword) {
    auto t = expect_line(keyword);
    if (t.size() != 2 || t[0] != keyword) fail(fmt::format("expected '{} <n>'", keyword));
    const long n = to_int(t[1]);
    if (n < 0) fail(fmt::format("negative count {}", n));
    return static_cast<int>(n);
  }
};

}  // namespace

Mesh parse_mesh(const std::string& text) {
  LineReader r(text);
  auto header = r.expect_line("header");
  if (header.size() != 3 || header[0] != "MPSA-MESH" || header[1] != "2D" || header[2] != "1")
    r.fail("expected header 'MPSA-MESH 2D 1'");

  const int nv = r.section_count("VERTICES");
  std::vector<Vec2> vertices;
  vertices.reserve(nv);
  for (int i = 0; i < nv; ++i) {
    auto t = r.expect_line("vertex");
    if (t.size() != 2) r.fail("vertex line must hold exactly two coordinates");
    vertices.emplace_back(r.to_double(t[0]), r.to_double(t[1]));
  }

  const int nc = r.section_count("CELLS");
  std::vector<std::vector<int>> cells;
  for (int k = 0; k < nc; ++k) {
    auto t = r.expect_line("cell");
    const long n = r.to_int(t[0]);
    if (n < 3) r.fail(fmt::format("cell {} must have at least 3 vertices", k));
    if (static_cast<long>(t.size()) != n + 1)
      r.fail(fmt::format("cell {} declares {} vertices but lists {}", k, n, t.size() - 1));
    std::vector<int> cell;
    for (long i = 1; i <= n; ++i) {
      const long v = r.to_int(t[i]);
      if (v < 0 || v >= nv) r.fail(fmt::format("cell {} references vertex {} out of range [0, {})", k, v, nv));
      cell.push_back(static_cast<int>(v));
    }
    std::vector<Vec2> poly;
    for (int v : cell) poly.push_back(vertices[v]);
    if (!(signed_area(poly) > 0.0)) r.fail(fmt::format("cell {} is not counterclockwise", k));
    cells.push_back(std::move(cell));
  }

  const int nb = r.section_count("BOUNDARY");
  std::map<FaceKey, BoundaryTag> tags;
  for (int i = 0; i < nb; ++i) {
    auto t = r.expect_line("boundary face");
    if (t.size() != 3) r.fail("boundary line must be '<vA> <vB> <tag>'");
    const long a = r.to_int(t[0]);
    const long b = r.to_int(t[1]);
    if (a < 0 || a >= nv || b < 0 || b >= nv) r.fail("boundary face references a vertex out of range");
    BoundaryTag tag;
    if (t[2] == "D") tag = BoundaryTag::Dirichlet;
    else if (t[2] == "N") tag = BoundaryTag::Neumann;
    else r.fail(fmt::format("unknown boundary tag '{}' (expected D or N)", t[2]));
    const FaceKey key = face_key(static_cast<int>(a), static_cast<int>(b));
    if (!tags.emplace(key, tag).second) r.fail("duplicate boundary face");
  }
  std::vector<std::string> extra;
  if (r.next(extra)) r.fail("unexpected trailing content");

  try {
    return Mesh(std::move(vertices), std::move(cells), tags, BoundaryTag::Unset);
  } catch (const MeshError& e) {
    throw MeshError(std::string("mesh validation failed: ") + e.what());
  }
}

Mesh load_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open mesh file '{}'", path));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_mesh(ss.str());
}

std::string format_mesh(const Mesh& mesh) {
  std::string out = "MPSA-MESH 2D 1\n";
  out += fmt::format("VERTICES {}\n", mesh.num_vertices());
  for (const auto& v : mesh.vertices()) out += fmt::format("{:.17g} {:.17g}\n", v.x(), v.y());
  out += fmt::format("CELLS {}\n", mesh.num_cells());
  for (const auto& c : mesh.cells()) {
    out += fmt::format("{}", c.size());
    for (int v : c) out += fmt::format(" {}", v);
    out += '\n';
  }
  int nb = 0;
  for (int f = 0; f < mesh.num_faces(); ++f)
    if (mesh.face(f).is_boundary() && mesh.face(f).tag != BoundaryTag::Unset) ++nb;
  out += fmt::format("BOUNDARY {}\n", nb);
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const Face& face = mesh.face(f);
    if (!face.is_boundary() || face.tag == BoundaryTag::Unset) continue;
    out += fmt::format("{} {} {}\n", face.vertices[0], face.vertices[1], tag_char(face.tag));
  }
  return out;
}

void save_mesh(const Mesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError(fmt::format("cannot write mesh file '{}'", path));
  out << format_mesh(mesh);
}

}  // namespace mpsa
