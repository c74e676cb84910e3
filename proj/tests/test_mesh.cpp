#include "mpsa/geometry.hpp"
#include "mpsa/mesh.hpp"

#include "support/fixtures.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

using namespace mpsa;

namespace {

double polygon_area(const std::array<Vec2, 4>& p) { return signed_area(std::span<const Vec2>(p.data(), 4)); }

}  // namespace

TEST(Generators, CartesianCounts) {
  const Mesh m = generate_mesh({MeshKind::Cartesian, 2, 2});
  EXPECT_EQ(m.num_cells(), 4);
  EXPECT_EQ(m.num_faces(), 12);
  EXPECT_EQ(m.num_vertices(), 9);
  for (int f = 0; f < m.num_faces(); ++f)
    if (m.face(f).is_boundary()) EXPECT_EQ(m.face(f).tag, BoundaryTag::Dirichlet);
}

TEST(Generators, SingleCellQuarters) {
  const Mesh m = generate_mesh({MeshKind::Cartesian, 1, 1});
  ASSERT_EQ(m.num_cells(), 1);
  for (int s : m.cell_vertices(0)) EXPECT_NEAR(subcell_area(m, 0, s), 0.25, 1e-15);
}

TEST(Generators, EquilateralRhombus) {
  const Mesh m = generate_mesh({MeshKind::EquilateralTri, 1, 1});
  ASSERT_EQ(m.num_cells(), 2);
  for (int k = 0; k < 2; ++k) {
    EXPECT_NEAR(m.area(k), std::sqrt(3.0) / 4, 1e-14);
    for (int s : m.cell_vertices(k)) EXPECT_NEAR(subcell_area(m, k, s), std::sqrt(3.0) / 12, 1e-14);
    // all sides of length one
    for (int f : m.cell_faces(k)) EXPECT_NEAR(m.face_length(f), 1.0, 1e-14);
  }
}

TEST(Generators, PerturbationMovesInteriorVerticesOnly) {
  const Mesh a = generate_mesh({MeshKind::Cartesian, 5, 5});
  const Mesh b = generate_mesh({MeshKind::PerturbedQuad, 5, 5, 0.3, 4});
  ASSERT_EQ(a.num_vertices(), b.num_vertices());
  int moved = 0;
  for (int s = 0; s < a.num_vertices(); ++s) {
    if (a.is_boundary_vertex(s)) EXPECT_EQ((a.vertex(s) - b.vertex(s)).norm(), 0.0);
    else moved += (a.vertex(s) - b.vertex(s)).norm() > 0;
  }
  EXPECT_GT(moved, 0);
}

TEST(Generators, PerturbationRangeChecked) {
  EXPECT_THROW(generate_mesh({MeshKind::PerturbedQuad, 4, 4, 0.4}), ConfigError);
  EXPECT_THROW(generate_mesh({MeshKind::PerturbedQuad, 4, 4, -0.1}), ConfigError);
}

TEST(Generators, SeedIsDeterministic) {
  const Mesh a = generate_mesh({MeshKind::PerturbedQuad, 4, 4, 0.2, 9});
  const Mesh b = generate_mesh({MeshKind::PerturbedQuad, 4, 4, 0.2, 9});
  EXPECT_EQ(format_mesh(a), format_mesh(b));
}

TEST(Generators, HexagonalDualHasMoreVerticesThanTwiceCells) {
  const Mesh m = generate_mesh({MeshKind::HexagonalDual, 6, 6});
  EXPECT_GT(m.num_vertices(), 2 * m.num_cells());
  for (int k = 0; k < m.num_cells(); ++k) EXPECT_GE(m.cell_vertices(k).size(), 3u);
}

TEST(MeshInvariants, PartitionsAndNormals) {
  for (const auto& [name, m] : fixtures::shipped_meshes(4)) {
    SCOPED_TRACE(name);
    double total = 0;
    for (int k = 0; k < m.num_cells(); ++k) {
      total += m.area(k);
      double sub = 0;
      for (int s : m.cell_vertices(k)) sub += subcell_area(m, k, s);
      EXPECT_NEAR(sub, m.area(k), 1e-12 * m.area(k));
    }
    EXPECT_NEAR(total, m.total_area(), 1e-12 * total);
    for (int f = 0; f < m.num_faces(); ++f) EXPECT_EQ(m.face(f).num_cells(), m.face(f).is_boundary() ? 1 : 2);

    std::vector<double> face_sum(m.num_faces(), 0.0);
    for (int s = 0; s < m.num_vertices(); ++s) {
      const InteractionRegion r = build_region(m, s);
      for (const auto& f : r.faces) face_sum[f.face] += f.length;
      for (const auto& c : r.cells)
        for (int j = 0; j < 2; ++j) {
          const auto& f = r.faces[c.faces[j]];
          EXPECT_NEAR(c.normals[j].norm(), 1.0, 1e-14);
          EXPECT_GT(c.normals[j].dot(f.midpoint - c.center), 0.0);
        }
      for (const auto& f : r.faces)
        if (!f.is_boundary()) {
          const Vec2 a = r.cells[f.cells[0]].normals[f.sides[0]];
          const Vec2 b = r.cells[f.cells[1]].normals[f.sides[1]];
          EXPECT_NEAR((a + b).norm(), 0.0, 1e-14);
        }
    }
    for (int f = 0; f < m.num_faces(); ++f) EXPECT_NEAR(face_sum[f], m.face_length(f), 1e-12 * m.face_length(f));
  }
}

TEST(MeshInvariants, EveryCornerHasTwoFaces) {
  const Mesh m = generate_mesh({MeshKind::HexagonalDual, 4, 4});
  for (int s = 0; s < m.num_vertices(); ++s) {
    const InteractionRegion r = build_region(m, s);
    for (const auto& c : r.cells) {
      EXPECT_GE(c.faces[0], 0);
      EXPECT_GE(c.faces[1], 0);
      EXPECT_NE(c.faces[0], c.faces[1]);
    }
  }
}

TEST(MeshValidation, RejectsClockwiseCell) {
  std::vector<Vec2> v = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  try {
    Mesh m(v, {{0, 3, 2, 1}});
    FAIL() << "clockwise cell accepted";
  } catch (const MeshError& e) {
    EXPECT_NE(std::string(e.what()).find("cell 0"), std::string::npos);
  }
}

TEST(MeshValidation, RejectsFaceSharedThreeTimes) {
  std::vector<Vec2> v = {{0, 0}, {1, 0}, {0.5, 1}, {0.5, -1}, {0.5, 2}};
  EXPECT_THROW(Mesh(v, {{0, 1, 2}, {0, 3, 1}, {0, 1, 4}}), MeshError);
}

TEST(MeshValidation, RejectsUnusedVertex) {
  std::vector<Vec2> v = {{0, 0}, {1, 0}, {0, 1}, {5, 5}};
  EXPECT_THROW(Mesh(v, {{0, 1, 2}}), MeshError);
}

TEST(MeshValidation, RejectsNonStarShapedCell) {
  // C shape: the centroid (1.7, 2) falls in the notch
  std::vector<Vec2> v = {{0, 0}, {4, 0}, {4, 1}, {1, 1}, {1, 3}, {4, 3}, {4, 4}, {0, 4}};
  EXPECT_THROW(Mesh(v, {{0, 1, 2, 3, 4, 5, 6, 7}}), MeshError);
}

TEST(MeshIo, RoundTripIsExact) {
  const Mesh a = fixtures::mixed_boundary(generate_mesh({MeshKind::PerturbedQuad, 3, 2, 0.25, 5}));
  const Mesh b = parse_mesh(format_mesh(a));
  ASSERT_EQ(a.num_vertices(), b.num_vertices());
  for (int s = 0; s < a.num_vertices(); ++s) {
    EXPECT_EQ(a.vertex(s).x(), b.vertex(s).x());
    EXPECT_EQ(a.vertex(s).y(), b.vertex(s).y());
  }
  EXPECT_EQ(a.cells(), b.cells());
  EXPECT_EQ(a.boundary_tags(), b.boundary_tags());
}

TEST(MeshIo, FileRoundTrip) {
  const Mesh a = generate_mesh({MeshKind::Cartesian, 2, 2});
  const auto path = std::filesystem::temp_directory_path() / "mpsa_mesh_roundtrip.txt";
  save_mesh(a, path.string());
  const Mesh b = load_mesh(path.string());
  std::filesystem::remove(path);
  EXPECT_EQ(format_mesh(a), format_mesh(b));
}

TEST(MeshIo, OutOfRangeVertexReportsLine) {
  const std::string text =
      "MPSA-MESH 2D 1\n"
      "VERTICES 3\n0 0\n1 0\n0 1\n"
      "CELLS 1\n3 0 1 7\n"
      "BOUNDARY 0\n";
  try {
    parse_mesh(text);
    FAIL() << "accepted a dangling vertex index";
  } catch (const MeshError& e) {
    EXPECT_NE(std::string(e.what()).find("line 7"), std::string::npos) << e.what();
  }
}

TEST(MeshIo, ClockwiseCellNamed) {
  const std::string text =
      "MPSA-MESH 2D 1\n"
      "VERTICES 3\n0 0\n1 0\n0 1\n"
      "CELLS 1\n3 0 2 1\n"
      "BOUNDARY 0\n";
  try {
    parse_mesh(text);
    FAIL() << "accepted a clockwise cell";
  } catch (const MeshError& e) {
    EXPECT_NE(std::string(e.what()).find("cell 0"), std::string::npos) << e.what();
  }
}

TEST(MeshIo, MalformedCountsRejected) {
  EXPECT_THROW(parse_mesh("MPSA-MESH 2D 1\nVERTICES 2\n0 0\n"), MeshError);
  EXPECT_THROW(parse_mesh("NOT-A-MESH\n"), MeshError);
}

TEST(MeshIo, UnknownTagRejected) {
  const std::string text =
      "MPSA-MESH 2D 1\nVERTICES 3\n0 0\n1 0\n0 1\nCELLS 1\n3 0 1 2\nBOUNDARY 1\n0 1 X\n";
  EXPECT_THROW(parse_mesh(text), MeshError);
}

TEST(Mesh, ScaledKeepsTopology) {
  const Mesh a = generate_mesh({MeshKind::Triangulated, 3, 3});
  const Mesh b = a.scaled(2.0);
  EXPECT_EQ(a.cells(), b.cells());
  EXPECT_NEAR(b.total_area(), 4.0 * a.total_area(), 1e-12);
}

TEST(Mesh, RetaggedChangesBoundaryOnly) {
  const Mesh a = generate_mesh({MeshKind::Cartesian, 3, 3});
  const Mesh b = a.retagged([](int, const Vec2&) { return BoundaryTag::Neumann; });
  EXPECT_TRUE(b.all_neumann());
  EXPECT_FALSE(b.has_dirichlet());
  EXPECT_TRUE(a.has_dirichlet());
}
