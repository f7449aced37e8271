#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "biphasic/errors.hpp"
#include "biphasic/mesh.hpp"

using namespace biphasic;

namespace {

MeshSpec box_spec(int nx, int ny, int nz, double lx = 1.0, double ly = 1.0, double lz = 1.0) {
  MeshSpec s;
  s.shape = MeshShape::box;
  s.nx = nx;
  s.ny = ny;
  s.nz = nz;
  s.lx = lx;
  s.ly = ly;
  s.lz = lz;
  return s;
}

MeshSpec cylinder_spec(int nc, int nr, int nz) {
  MeshSpec s;
  s.shape = MeshShape::quarter_cylinder;
  s.nc = nc;
  s.nr = nr;
  s.nz = nz;
  return s;
}

double facet_area(const Mesh& m, const Facet6& f) {
  const Vec3 a = m.coords(f[0]), b = m.coords(f[1]), c = m.coords(f[2]);
  return 0.5 * (b - a).cross(c - a).norm();
}

double set_area(const Mesh& m, const std::string& name) {
  double a = 0.0;
  for (const auto& f : m.facet_sets.at(name)) a += facet_area(m, f);
  return a;
}

std::string serialize(const Mesh& m) {
  std::ostringstream out;
  write_mesh(m, out);
  return out.str();
}

}  // namespace

TEST(MeshBox, SingleCellCounts) {
  const Mesh m = generate_box(box_spec(1, 1, 1));
  EXPECT_EQ(m.num_nodes(), 27);
  EXPECT_EQ(m.num_elements(), 6);
  EXPECT_NO_THROW(m.validate());
}

TEST(MeshBox, CountsScaleWithSubdivision) {
  const Mesh m = generate_box(box_spec(2, 3, 4));
  EXPECT_EQ(m.num_nodes(), 5 * 7 * 9);
  EXPECT_EQ(m.num_elements(), 6 * 2 * 3 * 4);
  int corners = 0;
  for (bool c : m.corner_mask()) corners += c ? 1 : 0;
  EXPECT_EQ(corners, 3 * 4 * 5);
}

TEST(MeshBox, VolumeAndPositiveElements) {
  const Mesh m = generate_box(box_spec(2, 2, 3, 1.5, 2.0, 8.0));
  EXPECT_NEAR(mesh_volume(m), 1.5 * 2.0 * 8.0, 1e-12);
  for (int e = 0; e < m.num_elements(); ++e) {
    const auto c = m.corner_coords(e);
    EXPECT_GT(signed_volume(c[0], c[1], c[2], c[3]), kDegenerateVolume);
  }
}

TEST(MeshBox, FacetSetsCoverEachFace) {
  const Mesh m = generate_box(box_spec(2, 2, 2, 1.0, 2.0, 3.0));
  for (const char* name : {"bottom", "top", "x0", "x1", "y0", "y1"}) ASSERT_TRUE(m.facet_sets.count(name)) << name;
  EXPECT_NEAR(set_area(m, "top"), 2.0, 1e-12);
  EXPECT_NEAR(set_area(m, "bottom"), 2.0, 1e-12);
  EXPECT_NEAR(set_area(m, "x0"), 6.0, 1e-12);
  EXPECT_NEAR(set_area(m, "y1"), 3.0, 1e-12);
  for (int n : m.facet_set_nodes("top")) EXPECT_DOUBLE_EQ(m.coords(n).z(), 3.0);
}

TEST(MeshBox, FacetNormalsPointOutward) {
  const Mesh m = generate_box(box_spec(2, 2, 2));
  const Vec3 centre(0.5, 0.5, 0.5);
  for (const auto& [name, facets] : m.facet_sets)
    for (const auto& f : facets) {
      const Vec3 a = m.coords(f[0]), b = m.coords(f[1]), c = m.coords(f[2]);
      const Vec3 n = (b - a).cross(c - a);
      EXPECT_GT(n.dot((a + b + c) / 3.0 - centre), 0.0) << name;
    }
}

TEST(MeshBox, MidsideNodesAtEdgeMidpoints) {
  const Mesh m = generate_box(box_spec(2, 1, 2, 1.0, 1.0, 2.0));
  for (int e = 0; e < m.num_elements(); ++e) {
    const auto x = m.node_coords(e);
    for (std::size_t k = 0; k < 6; ++k) {
      const auto [i, j] = kTet10Edges[k];
      EXPECT_LT((x[4 + k] - 0.5 * (x[static_cast<std::size_t>(i)] + x[static_cast<std::size_t>(j)])).norm(), 1e-14);
    }
  }
}

TEST(MeshBox, InvalidSpecThrows) {
  EXPECT_THROW(generate_box(box_spec(0, 1, 1)), ConfigError);
  EXPECT_THROW(generate_box(box_spec(1, 1, 1, -1.0)), ConfigError);
  EXPECT_THROW(generate_box(cylinder_spec(1, 1, 1)), ConfigError);
}

TEST(MeshCylinder, VolumeApproachesQuarterDisc) {
  const Mesh m = generate_quarter_cylinder(cylinder_spec(3, 3, 2));
  const double exact = std::numbers::pi * 18.0 * 18.0 * 8.0 / 4.0;
  EXPECT_NEAR(mesh_volume(m) / exact, 1.0, 2e-3);
  EXPECT_NO_THROW(m.validate());
}

TEST(MeshCylinder, FacetSetsAndLateralRadius) {
  const Mesh m = generate_quarter_cylinder(cylinder_spec(2, 2, 2));
  for (const char* name : {"top", "bottom", "lateral", "sym_x", "sym_y"}) ASSERT_TRUE(m.facet_sets.count(name)) << name;
  for (int n : m.facet_set_nodes("lateral")) EXPECT_NEAR(m.coords(n).head<2>().norm(), 18.0, 1e-9);
  for (int n : m.facet_set_nodes("sym_x")) EXPECT_EQ(m.coords(n).x(), 0.0);
  for (int n : m.facet_set_nodes("sym_y")) EXPECT_EQ(m.coords(n).y(), 0.0);
}

TEST(MeshCylinder, ReferenceLineHasOneNodePerHalfLayer) {
  for (int nz : {5, 7, 9}) {
    const Mesh m = generate_quarter_cylinder(cylinder_spec(2, 1, nz));
    const auto nodes = reference_line_nodes(m, {Vec3::Zero(), Vec3::UnitZ()}, 1e-9);
    ASSERT_EQ(static_cast<int>(nodes.size()), 2 * nz + 1);
    int corners = 0;
    for (int n : nodes) corners += m.corner_mask()[static_cast<std::size_t>(n)] ? 1 : 0;
    EXPECT_EQ(corners, nz + 1);
    for (std::size_t i = 1; i < nodes.size(); ++i) EXPECT_GT(m.coords(nodes[i]).z(), m.coords(nodes[i - 1]).z());
  }
}

TEST(MeshCylinder, ReferenceLineMissThrows) {
  const Mesh m = generate_quarter_cylinder(cylinder_spec(2, 1, 2));
  EXPECT_THROW(reference_line_nodes(m, {Vec3(50, 50, 0), Vec3::UnitZ()}, 1e-9), QueryError);
  EXPECT_THROW(reference_line_nodes(m, {Vec3::Zero(), Vec3::Zero()}, 1e-9), QueryError);
}

TEST(Geometry, CircumsphereOfUnitCornerTet) {
  const std::array<Vec3, 4> c{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)};
  EXPECT_NEAR(circumsphere_radius(c), std::sqrt(3.0) / 2.0, 1e-15);
}

TEST(Geometry, CircumsphereInvariantUnderRigidMotionAndScales) {
  const std::array<Vec3, 4> c{Vec3(0.1, 0.2, 0), Vec3(1.3, 0.1, 0.2), Vec3(0.2, 0.9, 0.1), Vec3(0.4, 0.3, 1.1)};
  const double r = circumsphere_radius(c);
  const Mat3 R = Eigen::AngleAxisd(0.7, Vec3(1, 2, 3).normalized()).toRotationMatrix();
  std::array<Vec3, 4> moved;
  for (std::size_t i = 0; i < 4; ++i) moved[i] = 2.5 * (R * c[i]) + Vec3(4, -1, 2);
  EXPECT_NEAR(circumsphere_radius(moved), 2.5 * r, 1e-12);
}

TEST(Geometry, DegenerateTetThrows) {
  const std::array<Vec3, 4> flat{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(1, 1, 0)};
  EXPECT_THROW(circumsphere_radius(flat), GeometryError);
}

TEST(MeshIo, RoundTripIsExact) {
  const Mesh m = generate_quarter_cylinder(cylinder_spec(2, 1, 2));
  const std::string text = serialize(m);
  std::istringstream in(text);
  const Mesh r = read_mesh(in);
  ASSERT_EQ(r.num_nodes(), m.num_nodes());
  ASSERT_EQ(r.num_elements(), m.num_elements());
  for (int i = 0; i < m.num_nodes(); ++i) EXPECT_EQ(r.coords(i), m.coords(i));
  for (int e = 0; e < m.num_elements(); ++e) EXPECT_EQ(r.elements[e].nodes, m.elements[e].nodes);
  EXPECT_EQ(r.facet_sets, m.facet_sets);
  EXPECT_EQ(serialize(r), text);
}

TEST(MeshIo, BadHeaderReportsLine) {
  std::istringstream in("not-a-mesh\n");
  try {
    read_mesh(in);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 1);
  }
}

TEST(MeshIo, MalformedVertexReportsLine) {
  std::string text = serialize(generate_box(box_spec(1, 1, 1)));
  const auto pos = text.find("\n0 ");
  text.replace(pos + 1, 2, "0 abc ");
  std::istringstream in(text);
  try {
    read_mesh(in);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3);
  }
}

TEST(MeshIo, InvertedElementIsRejected) {
  Mesh m = generate_box(box_spec(1, 1, 1));
  std::swap(m.elements[2].nodes[1], m.elements[2].nodes[2]);
  std::swap(m.elements[2].nodes[4 + 0], m.elements[2].nodes[4 + 2]);
  std::swap(m.elements[2].nodes[4 + 4], m.elements[2].nodes[4 + 5]);
  std::istringstream in(serialize(m));
  try {
    read_mesh(in);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("element 2"), std::string::npos) << e.what();
  }
}

TEST(MeshValidate, InteriorFacetInSetIsRejected) {
  Mesh m = generate_box(box_spec(2, 1, 1));
  // Any element face lying in the internal plane x = 0.5.
  bool injected = false;
  for (int e = 0; e < m.num_elements() && !injected; ++e) {
    const auto& n = m.elements[e].nodes;
    const std::array<std::array<int, 6>, 4> faces{{{n[1], n[2], n[3], n[5], n[9], n[8]},
                                                   {n[0], n[3], n[2], n[7], n[9], n[6]},
                                                   {n[0], n[1], n[3], n[4], n[8], n[7]},
                                                   {n[0], n[2], n[1], n[6], n[5], n[4]}}};
    for (const auto& f : faces) {
      bool in_plane = true;
      for (int k = 0; k < 3; ++k) in_plane = in_plane && m.coords(f[k]).x() == 0.5;
      if (in_plane) {
        m.facet_sets["top"].push_back(f);
        injected = true;
        break;
      }
    }
  }
  ASSERT_TRUE(injected);
  EXPECT_THROW(m.validate(), ValidationError);
}

TEST(MeshValidate, OrphanNodeIsRejected) {
  Mesh m = generate_box(box_spec(1, 1, 1));
  m.vertices.push_back({m.num_nodes(), Vec3(5, 5, 5)});
  EXPECT_THROW(m.validate(), ValidationError);
}

TEST(MeshValidate, MissingNodeReferenceIsRejected) {
  Mesh m = generate_box(box_spec(1, 1, 1));
  m.elements[0].nodes[9] = 999;
  EXPECT_THROW(m.validate(), ValidationError);
}

TEST(MeshIo, MissingFileIsIoError) { EXPECT_THROW(read_mesh(std::filesystem::path("/nonexistent/x.mesh")), IoError); }
