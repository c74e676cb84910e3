#pragma once

#include "mpsa/mesh.hpp"

#include <string>
#include <utility>
#include <vector>

namespace fixtures {

/// One small member of every generated mesh family, all boundaries Dirichlet.
inline std::vector<std::pair<std::string, mpsa::Mesh>> shipped_meshes(int n = 6) {
  using mpsa::MeshKind;
  std::vector<std::pair<std::string, mpsa::MeshSpec>> specs = {
      {"cartesian", {MeshKind::Cartesian, n, n}},
      {"perturbed", {MeshKind::PerturbedQuad, n, n, 0.2, 7}},
      {"triangles", {MeshKind::Triangulated, n, n}},
      {"perturbed_triangles", {MeshKind::Triangulated, n, n, 0.2, 3}},
      {"equilateral", {MeshKind::EquilateralTri, n, n}},
      {"hexagonal", {MeshKind::HexagonalDual, n, n}},
      {"rhombic", {MeshKind::Rhombic, n, n}},
  };
  std::vector<std::pair<std::string, mpsa::Mesh>> out;
  for (auto& [name, spec] : specs) out.emplace_back(name, mpsa::generate_mesh(spec));
  return out;
}

/// Left and bottom sides Dirichlet, the rest Neumann.
inline mpsa::Mesh mixed_boundary(const mpsa::Mesh& mesh) {
  return mesh.retagged([](int, const mpsa::Vec2& x) {
    return (x.x() < 1e-9 || x.y() < 1e-9) ? mpsa::BoundaryTag::Dirichlet : mpsa::BoundaryTag::Neumann;
  });
}

}  // namespace fixtures
