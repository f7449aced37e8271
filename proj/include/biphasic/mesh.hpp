#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace biphasic {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Local edge order of the ten-node tetrahedron. Node 4 + e is the midpoint
/// of edge e. This is the VTK_QUADRATIC_TETRA convention.
inline constexpr std::array<std::array<int, 2>, 6> kTet10Edges{{
    {0, 1}, {1, 2}, {0, 2}, {0, 3}, {1, 3}, {2, 3}}};

struct Vertex {
  int id = 0;
  Vec3 coords = Vec3::Zero();  // mm
};

struct Tet10 {
  std::array<int, 10> nodes{};
  int region_tag = 0;

  std::span<const int, 4> corners() const { return std::span<const int, 4>(nodes.data(), 4); }
};

/// Six-node boundary triangle: three corners then the midpoints of
/// (c0,c1), (c1,c2), (c2,c0). Corners are ordered so the normal points out.
using Facet6 = std::array<int, 6>;

struct Mesh {
  std::vector<Vertex> vertices;
  std::vector<Tet10> elements;
  std::map<std::string, std::vector<Facet6>> facet_sets;
  std::map<std::string, std::vector<int>> node_sets;

  int num_nodes() const { return static_cast<int>(vertices.size()); }
  int num_elements() const { return static_cast<int>(elements.size()); }

  const Vec3& coords(int node) const { return vertices[static_cast<std::size_t>(node)].coords; }
  std::array<Vec3, 4> corner_coords(int element) const;
  std::array<Vec3, 10> node_coords(int element) const;

  /// True for nodes that are a corner of at least one element.
  std::vector<bool> corner_mask() const;

  /// Sorted, unique node ids touched by a facet set (corners and midsides).
  std::vector<int> facet_set_nodes(const std::string& name) const;
  /// Sorted, unique corner node ids of a facet set.
  std::vector<int> facet_set_corner_nodes(const std::string& name) const;

  /// Throws ValidationError on the first broken invariant.
  void validate() const;
};

enum class MeshShape { box, quarter_cylinder };

/// Structured mesh request. For a box, (lx, ly, lz) and (nx, ny, nz) apply.
/// For a quarter cylinder, radius/height apply with nc cells along each side of
/// the square core, nr cells radially in the outer ring, nz layers in height.
struct MeshSpec {
  MeshShape shape = MeshShape::box;
  double lx = 1.0, ly = 1.0, lz = 1.0;
  int nx = 1, ny = 1, nz = 1;
  double radius = 18.0, height = 8.0;
  int nc = 4, nr = 4;
  /// Side of the square core as a fraction of the radius.
  double core_fraction = 0.55;

  void validate() const;
};

Mesh generate_box(const MeshSpec& spec);
Mesh generate_quarter_cylinder(const MeshSpec& spec);
Mesh generate_mesh(const MeshSpec& spec);

/// Absolute volume below which a tetrahedron counts as degenerate (mm^3).
inline constexpr double kDegenerateVolume = 1e-12;

double signed_volume(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d);

/// Radius of the sphere through the four corners. Throws GeometryError on a
/// degenerate tetrahedron.
double circumsphere_radius(const std::array<Vec3, 4>& corners);

/// Volume of a (possibly curved) Tet10 under its isoparametric map.
double element_volume(const Mesh& mesh, int element);
double mesh_volume(const Mesh& mesh);

/// Infinite line through `point` along `direction` (need not be normalized).
struct Line {
  Vec3 point = Vec3::Zero();
  Vec3 direction = Vec3::UnitZ();
};

/// Nodes within `tol` of the line, ordered by their coordinate along it.
/// Throws QueryError when fewer than two nodes qualify.
std::vector<int> reference_line_nodes(const Mesh& mesh, const Line& line, double tol);

/// Axial coordinate of a point along the line, measured from line.point.
double line_coordinate(const Line& line, const Vec3& x);

void write_mesh(const Mesh& mesh, const std::filesystem::path& path);
void write_mesh(const Mesh& mesh, std::ostream& out);
Mesh read_mesh(const std::filesystem::path& path);
Mesh read_mesh(std::istream& in);

}  // namespace biphasic
