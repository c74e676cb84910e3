#include "mpsa/mesh.hpp"

#include <fmt/format.h>

#include <cmath>
#include <random>

namespace mpsa {

MeshKind parse_mesh_kind(const std::string& name) {
  if (name == "cartesian") return MeshKind::Cartesian;
  if (name == "triangulated") return MeshKind::Triangulated;
  if (name == "perturbed_quad") return MeshKind::PerturbedQuad;
  if (name == "equilateral_tri") return MeshKind::EquilateralTri;
  if (name == "hexagonal_dual") return MeshKind::HexagonalDual;
  if (name == "rhombic") return MeshKind::Rhombic;
  throw ConfigError(fmt::format("unknown mesh kind '{}'", name));
}

std::string to_string(MeshKind kind) {
  switch (kind) {
    case MeshKind::Cartesian: return "cartesian";
    case MeshKind::Triangulated: return "triangulated";
    case MeshKind::PerturbedQuad: return "perturbed_quad";
    case MeshKind::EquilateralTri: return "equilateral_tri";
    case MeshKind::HexagonalDual: return "hexagonal_dual";
    case MeshKind::Rhombic: return "rhombic";
  }
  return "?";
}

namespace {

struct Raw {
  std::vector<Vec2> vertices;
  std::vector<std::vector<int>> cells;
  double spacing = 1.0;  // reference length for the perturbation
};

// Lattice p(i,j) = i*e1 + j*e2, 0 <= i <= nx, 0 <= j <= ny.
int lattice(int i, int j, int nx) { return j * (nx + 1) + i; }

Raw lattice_vertices(int nx, int ny, const Vec2& e1, const Vec2& e2) {
  Raw r;
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) r.vertices.push_back(i * e1 + j * e2);
  r.spacing = std::min(e1.norm(), e2.norm());
  return r;
}

Raw quads(int nx, int ny, const Vec2& e1, const Vec2& e2) {
  Raw r = lattice_vertices(nx, ny, e1, e2);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      r.cells.push_back({lattice(i, j, nx), lattice(i + 1, j, nx), lattice(i + 1, j + 1, nx), lattice(i, j + 1, nx)});
  return r;
}

// Split each lattice quad along the diagonal p(i+1,j)-p(i,j+1).
Raw triangles(int nx, int ny, const Vec2& e1, const Vec2& e2) {
  Raw r = lattice_vertices(nx, ny, e1, e2);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int a = lattice(i, j, nx), b = lattice(i + 1, j, nx);
      const int c = lattice(i + 1, j + 1, nx), d = lattice(i, j + 1, nx);
      r.cells.push_back({a, b, d});
      r.cells.push_back({b, c, d});
    }
  return r;
}

// Pointy-top regular hexagons on an offset-row lattice; the domain boundary is jagged.
Raw hexagons(int nx, int ny, double lx) {
  const double w = lx / (nx + 0.5);
  const double rad = w / std::sqrt(3.0);
  Raw r;
  r.spacing = rad;
  std::map<std::pair<long long, long long>, int> index;
  auto vertex_id = [&](const Vec2& p) {
    const auto key = std::make_pair(std::llround(p.x() / rad * 1e6), std::llround(p.y() / rad * 1e6));
    auto [it, inserted] = index.try_emplace(key, static_cast<int>(r.vertices.size()));
    if (inserted) r.vertices.push_back(p);
    return it->second;
  };
  const double pi = std::acos(-1.0);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const Vec2 c(w * (i + 0.5 + 0.5 * (j % 2)), rad * (1.0 + 1.5 * j));
      std::vector<int> cell;
      for (int k = 0; k < 6; ++k) {
        const double a = pi / 6.0 + k * pi / 3.0;
        cell.push_back(vertex_id(c + rad * Vec2(std::cos(a), std::sin(a))));
      }
      r.cells.push_back(std::move(cell));
    }
  return r;
}

}  // namespace

Mesh generate_mesh(const MeshSpec& spec) {
  if (spec.nx < 1 || spec.ny < 1)
    throw ConfigError(fmt::format("mesh resolution must be at least 1 per axis (got {}x{})", spec.nx, spec.ny));
  if (!(spec.perturbation >= 0.0 && spec.perturbation < 0.4))
    throw ConfigError(fmt::format("perturbation must lie in [0, 0.4) (got {})", spec.perturbation));
  if (!(spec.lx > 0.0 && spec.ly > 0.0)) throw ConfigError("domain extents must be positive");

  const double hx = spec.lx / spec.nx;
  const double hy = spec.ly / spec.ny;
  const double s3 = std::sqrt(3.0);
  Raw raw;
  switch (spec.kind) {
    case MeshKind::Cartesian:
    case MeshKind::PerturbedQuad: raw = quads(spec.nx, spec.ny, {hx, 0}, {0, hy}); break;
    case MeshKind::Triangulated: raw = triangles(spec.nx, spec.ny, {hx, 0}, {0, hy}); break;
    case MeshKind::EquilateralTri: raw = triangles(spec.nx, spec.ny, {hx, 0}, {0.5 * hx, 0.5 * s3 * hx}); break;
    case MeshKind::Rhombic: raw = quads(spec.nx, spec.ny, {hx, 0}, {0.5 * hx, 0.5 * s3 * hx}); break;
    case MeshKind::HexagonalDual: raw = hexagons(spec.nx, spec.ny, spec.lx); break;
  }

  if (spec.perturbation > 0.0) {
    const Mesh base(raw.vertices, raw.cells);
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int s = 0; s < base.num_vertices(); ++s) {
      // Draw for every vertex so the stream does not depend on the boundary layout.
      const Vec2 delta(dist(rng), dist(rng));
      if (!base.is_boundary_vertex(s)) raw.vertices[s] += spec.perturbation * raw.spacing * delta;
    }
  }
  try {
    return Mesh(std::move(raw.vertices), std::move(raw.cells));
  } catch (const MeshError& e) {
    throw MeshError(fmt::format("generated {} mesh is invalid: {}", to_string(spec.kind), e.what()));
  }
}

}  // namespace mpsa
