#include "mpsa/mesh.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace mpsa {

char tag_char(BoundaryTag tag) {
  switch (tag) {
    case BoundaryTag::Dirichlet: return 'D';
    case BoundaryTag::Neumann: return 'N';
    case BoundaryTag::Interior: return 'I';
    case BoundaryTag::Unset: return '?';
  }
  return '?';
}

double signed_area(std::span<const Vec2> polygon) {
  double a = 0.0;
  const std::size_t n = polygon.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& p = polygon[i];
    const Vec2& q = polygon[(i + 1) % n];
    a += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * a;
}

Vec2 polygon_centroid(std::span<const Vec2> polygon) {
  // Triangle fan around the first vertex keeps round-off small for convex cells.
  Vec2 c = Vec2::Zero();
  double a = 0.0;
  for (std::size_t i = 1; i + 1 < polygon.size(); ++i) {
    const Vec2 e1 = polygon[i] - polygon[0];
    const Vec2 e2 = polygon[i + 1] - polygon[0];
    const double t = 0.5 * (e1.x() * e2.y() - e1.y() * e2.x());
    c += t * (polygon[0] + polygon[i] + polygon[i + 1]) / 3.0;
    a += t;
  }
  return c / a;
}

Mesh::Mesh(std::vector<Vec2> vertices, std::vector<std::vector<int>> cells,
           const std::map<FaceKey, BoundaryTag>& tags, BoundaryTag default_tag)
    : vertices_(std::move(vertices)), cells_(std::move(cells)) {
  build();
  for (auto& f : faces_) {
    if (!f.is_boundary()) continue;
    auto it = tags.find({f.vertices[0], f.vertices[1]});
    f.tag = it != tags.end() ? it->second : default_tag;
  }
  for (const auto& [key, tag] : tags) {
    const int f = find_face(key.first, key.second);
    if (f < 0 || !faces_[f].is_boundary())
      throw MeshError(fmt::format("boundary tag given for ({}, {}) which is not a boundary face",
                                  key.first, key.second));
  }
}

void Mesh::build() {
  const int nv = num_vertices();
  const int nc = num_cells();
  cell_faces_.assign(nc, {});
  vertex_cells_.assign(nv, {});
  vertex_faces_.assign(nv, {});
  centers_.resize(nc);
  areas_.resize(nc);
  diameters_.resize(nc);

  for (int k = 0; k < nc; ++k) {
    const auto& cv = cells_[k];
    if (cv.size() < 3) throw MeshError(fmt::format("cell {} has fewer than 3 vertices", k));
    std::vector<Vec2> poly;
    for (int v : cv) {
      if (v < 0 || v >= nv)
        throw MeshError(fmt::format("cell {} references vertex {} out of range [0, {})", k, v, nv));
      poly.push_back(vertices_[v]);
    }
    std::vector<int> sorted = cv;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw MeshError(fmt::format("cell {} repeats a vertex", k));
    const double a = signed_area(poly);
    if (!(a > 0.0)) throw MeshError(fmt::format("cell {} is not counterclockwise (signed area {:.6g})", k, a));
    areas_[k] = a;
    centers_[k] = polygon_centroid(poly);
    double d = 0.0;
    for (const auto& p : poly)
      for (const auto& q : poly) d = std::max(d, (p - q).norm());
    diameters_[k] = d;

    const int n = static_cast<int>(cv.size());
    for (int i = 0; i < n; ++i) {
      // Star-shapedness with respect to the centroid, tested at both subface midpoints.
      const Vec2& pa = vertices_[cv[i]];
      const Vec2& pb = vertices_[cv[(i + 1) % n]];
      const Vec2 t = pb - pa;
      const Vec2 nrm(t.y(), -t.x());
      for (double w : {0.25, 0.75}) {
        const Vec2 x = (1.0 - w) * pa + w * pb;
        if (!((x - centers_[k]).dot(nrm) > 1e-14 * t.squaredNorm()))
          throw MeshError(fmt::format("cell {} is not star-shaped with respect to its centroid (face {}-{})", k,
                                      cv[i], cv[(i + 1) % n]));
      }
    }
    for (int i = 0; i < n; ++i) {
      const int a0 = cv[i];
      const int b0 = cv[(i + 1) % n];
      const FaceKey key = face_key(a0, b0);
      auto [it, inserted] = face_index_.try_emplace(key, num_faces());
      if (inserted) {
        Face f;
        f.vertices = {key.first, key.second};
        f.cells = {k, -1};
        faces_.push_back(f);
      } else {
        Face& f = faces_[it->second];
        if (f.cells[1] >= 0)
          throw MeshError(fmt::format("face ({}, {}) is shared by more than two cells", key.first, key.second));
        if (f.cells[0] == k) throw MeshError(fmt::format("cell {} uses face ({}, {}) twice", k, key.first, key.second));
        f.cells[1] = k;
        if (f.cells[1] < f.cells[0]) std::swap(f.cells[0], f.cells[1]);
      }
      cell_faces_[k].push_back(it->second);
      vertex_cells_[a0].push_back(k);
    }
  }
  for (int f = 0; f < num_faces(); ++f) {
    Face& face = faces_[f];
    face.tag = face.is_boundary() ? BoundaryTag::Unset : BoundaryTag::Interior;
    vertex_faces_[face.vertices[0]].push_back(f);
    vertex_faces_[face.vertices[1]].push_back(f);
  }
  for (int s = 0; s < nv; ++s) {
    auto& vc = vertex_cells_[s];
    std::sort(vc.begin(), vc.end());
    std::sort(vertex_faces_[s].begin(), vertex_faces_[s].end());
    if (vc.empty()) throw MeshError(fmt::format("vertex {} is not used by any cell", s));
  }
}

double Mesh::h() const { return diameters_.empty() ? 0.0 : *std::max_element(diameters_.begin(), diameters_.end()); }

double Mesh::total_area() const {
  double a = 0.0;
  for (double x : areas_) a += x;
  return a;
}

int Mesh::find_face(int a, int b) const {
  auto it = face_index_.find(face_key(a, b));
  return it == face_index_.end() ? -1 : it->second;
}

double Mesh::face_length(int f) const {
  return (vertices_[faces_[f].vertices[1]] - vertices_[faces_[f].vertices[0]]).norm();
}

Vec2 Mesh::face_midpoint(int f) const {
  return 0.5 * (vertices_[faces_[f].vertices[0]] + vertices_[faces_[f].vertices[1]]);
}

bool Mesh::is_boundary_vertex(int s) const {
  for (int f : vertex_faces_[s])
    if (faces_[f].is_boundary()) return true;
  return false;
}

bool Mesh::has_dirichlet() const {
  return std::any_of(faces_.begin(), faces_.end(), [](const Face& f) { return f.tag == BoundaryTag::Dirichlet; });
}

bool Mesh::all_neumann() const {
  return std::all_of(faces_.begin(), faces_.end(),
                     [](const Face& f) { return !f.is_boundary() || f.tag == BoundaryTag::Neumann; });
}

bool Mesh::is_simplex() const {
  return std::all_of(cells_.begin(), cells_.end(), [](const auto& c) { return c.size() == 3; });
}

Mesh Mesh::retagged(const std::function<BoundaryTag(int, const Vec2&)>& tagger) const {
  Mesh m = *this;
  for (int f = 0; f < num_faces(); ++f) {
    if (!m.faces_[f].is_boundary()) continue;
    m.faces_[f].tag = tagger(f, face_midpoint(f));
  }
  return m;
}

Mesh Mesh::scaled(double c) const {
  std::vector<Vec2> v = vertices_;
  for (auto& p : v) p *= c;
  return Mesh(std::move(v), cells_, boundary_tags(), BoundaryTag::Unset);
}

std::map<FaceKey, BoundaryTag> Mesh::boundary_tags() const {
  std::map<FaceKey, BoundaryTag> tags;
  for (const auto& f : faces_)
    if (f.is_boundary() && f.tag != BoundaryTag::Unset) tags[{f.vertices[0], f.vertices[1]}] = f.tag;
  return tags;
}

}  // namespace mpsa
