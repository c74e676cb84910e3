#pragma once

#include "mpsa/types.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace mpsa {

enum class BoundaryTag : std::uint8_t { Interior, Dirichlet, Neumann, Unset };

char tag_char(BoundaryTag tag);

struct Face {
  std::array<int, 2> vertices{};    // ascending vertex indices
  std::array<int, 2> cells{-1, -1};  // ascending; cells[1] == -1 on the boundary
  BoundaryTag tag = BoundaryTag::Interior;

  bool is_boundary() const { return cells[1] < 0; }
  int num_cells() const { return is_boundary() ? 1 : 2; }
};

using FaceKey = std::pair<int, int>;  // (min vertex, max vertex)

inline FaceKey face_key(int a, int b) { return a < b ? FaceKey{a, b} : FaceKey{b, a}; }

/// Polygonal 2D mesh triplet: cells, faces and vertices with derived adjacency.
///
/// Cells are counterclockwise vertex loops. Face i of a cell joins its local
/// vertices i and i+1. The object is immutable once built; boundary tags are
/// changed by building a retagged copy.
class Mesh {
 public:
  Mesh() = default;

  /// Builds and validates the topology. Boundary faces not present in `tags`
  /// get `default_tag` (use BoundaryTag::Unset to leave them untagged).
  Mesh(std::vector<Vec2> vertices, std::vector<std::vector<int>> cells,
       const std::map<FaceKey, BoundaryTag>& tags = {},
       BoundaryTag default_tag = BoundaryTag::Dirichlet);

  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_cells() const { return static_cast<int>(cells_.size()); }
  int num_faces() const { return static_cast<int>(faces_.size()); }

  const Vec2& vertex(int s) const { return vertices_[s]; }
  const std::vector<Vec2>& vertices() const { return vertices_; }
  std::span<const int> cell_vertices(int k) const { return cells_[k]; }
  const std::vector<std::vector<int>>& cells() const { return cells_; }
  std::span<const int> cell_faces(int k) const { return cell_faces_[k]; }
  const Face& face(int f) const { return faces_[f]; }

  /// Cells sharing vertex s, ascending.
  std::span<const int> vertex_cells(int s) const { return vertex_cells_[s]; }
  /// Faces incident to vertex s, ascending.
  std::span<const int> vertex_faces(int s) const { return vertex_faces_[s]; }

  const Vec2& center(int k) const { return centers_[k]; }
  double area(int k) const { return areas_[k]; }
  double diameter(int k) const { return diameters_[k]; }
  /// Largest cell diameter.
  double h() const;
  double total_area() const;

  /// Face joining vertices a and b, or -1.
  int find_face(int a, int b) const;
  double face_length(int f) const;
  Vec2 face_midpoint(int f) const;

  bool is_boundary_vertex(int s) const;
  bool has_dirichlet() const;
  bool all_neumann() const;
  bool is_simplex() const;

  /// Copy with boundary faces retagged by `tagger(face index, face midpoint)`.
  Mesh retagged(const std::function<BoundaryTag(int, const Vec2&)>& tagger) const;
  /// Copy with all coordinates multiplied by c.
  Mesh scaled(double c) const;

  std::map<FaceKey, BoundaryTag> boundary_tags() const;

 private:
  void build();

  std::vector<Vec2> vertices_;
  std::vector<std::vector<int>> cells_;
  std::vector<std::vector<int>> cell_faces_;
  std::vector<Face> faces_;
  std::map<FaceKey, int> face_index_;
  std::vector<std::vector<int>> vertex_cells_;
  std::vector<std::vector<int>> vertex_faces_;
  std::vector<Vec2> centers_;
  std::vector<double> areas_;
  std::vector<double> diameters_;
};

double signed_area(std::span<const Vec2> polygon);
Vec2 polygon_centroid(std::span<const Vec2> polygon);

// --- generators ------------------------------------------------------------

enum class MeshKind { Cartesian, Triangulated, PerturbedQuad, EquilateralTri, HexagonalDual, Rhombic };

MeshKind parse_mesh_kind(const std::string& name);
std::string to_string(MeshKind kind);

struct MeshSpec {
  MeshKind kind = MeshKind::Cartesian;
  int nx = 4;
  int ny = 4;
  /// Maximum interior vertex displacement as a fraction of the local spacing.
  double perturbation = 0.0;
  std::uint64_t seed = 1;
  double lx = 1.0;
  double ly = 1.0;
};

/// Generates a mesh family member. All boundary faces are tagged Dirichlet.
/// Throws MeshError if the perturbation produces a non star-shaped cell.
Mesh generate_mesh(const MeshSpec& spec);

// --- text format -------------------------------------------------------------

Mesh load_mesh(const std::string& path);
Mesh parse_mesh(const std::string& text);
void save_mesh(const Mesh& mesh, const std::string& path);
std::string format_mesh(const Mesh& mesh);

}  // namespace mpsa
