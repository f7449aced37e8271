#include "biphasic/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>

#include "biphasic/errors.hpp"
#include "biphasic/fem.hpp"

namespace biphasic {

namespace {

using Vec2 = Eigen::Vector2d;
using Tri = std::array<int, 3>;
using FaceKey = std::array<int, 3>;

// Outward faces of a positively oriented tetrahedron.
constexpr int kTetFaces[4][3] = {{1, 2, 3}, {0, 3, 2}, {0, 1, 3}, {0, 2, 1}};

FaceKey sorted_face(int a, int b, int c) {
  FaceKey f{a, b, c};
  std::sort(f.begin(), f.end());
  return f;
}

int local_edge(int a, int b) {
  for (int e = 0; e < 6; ++e) {
    const auto [i, j] = kTet10Edges[static_cast<std::size_t>(e)];
    if ((i == a && j == b) || (i == b && j == a)) return e;
  }
  return -1;
}

// Prism symmetries taking each vertex to position 0, preserving the
// bottom/top pairing (i, i + 3).
constexpr int kPrismRotation[6][6] = {
    {0, 1, 2, 3, 4, 5}, {1, 2, 0, 4, 5, 3}, {2, 0, 1, 5, 3, 4},
    {3, 5, 4, 0, 2, 1}, {4, 3, 5, 1, 0, 2}, {5, 4, 3, 2, 1, 0}};

// Splits a triangular prism into three tetrahedra so that every quadrilateral
// face is cut along the diagonal through its smallest global vertex id. Two
// prisms sharing a face therefore always agree on the diagonal.
std::array<std::array<int, 4>, 3> split_prism(const std::array<int, 6>& v) {
  const auto min_it = std::min_element(v.begin(), v.end());
  const auto m = static_cast<std::size_t>(std::distance(v.begin(), min_it));
  std::array<int, 6> w{};
  for (std::size_t i = 0; i < 6; ++i) w[i] = v[static_cast<std::size_t>(kPrismRotation[m][i])];

  if (std::min(w[1], w[5]) < std::min(w[2], w[4])) {
    return {{{w[0], w[1], w[2], w[5]}, {w[0], w[1], w[5], w[4]}, {w[0], w[4], w[5], w[3]}}};
  }
  return {{{w[0], w[1], w[2], w[4]}, {w[0], w[4], w[2], w[5]}, {w[0], w[4], w[5], w[3]}}};
}

struct Planar {
  std::vector<Vec2> points;
  std::vector<Tri> triangles;
};

using FaceClassifier = std::function<std::string(const std::array<Vec3, 3>&)>;
using MidsideProjector = std::function<Vec3(const Vec3& a, const Vec3& b)>;

// Extrudes a planar triangulation through nz layers of [0, height], splits
// every prism into tetrahedra, inserts midside nodes and tags boundary facets.
Mesh extrude(const Planar& planar, int nz, double height, const FaceClassifier& classify,
             const MidsideProjector& midside) {
  Mesh mesh;
  const int n2d = static_cast<int>(planar.points.size());
  const int n_corner = n2d * (nz + 1);
  mesh.vertices.reserve(static_cast<std::size_t>(n_corner));
  for (int k = 0; k <= nz; ++k) {
    const double z = (k == nz) ? height : height * k / nz;
    for (int i = 0; i < n2d; ++i) {
      const Vec2& p = planar.points[static_cast<std::size_t>(i)];
      mesh.vertices.push_back({k * n2d + i, Vec3(p.x(), p.y(), z)});
    }
  }

  std::vector<std::array<int, 4>> tets;
  tets.reserve(planar.triangles.size() * static_cast<std::size_t>(3 * nz));
  for (int k = 0; k < nz; ++k) {
    for (const Tri& t : planar.triangles) {
      const std::array<int, 6> prism{k * n2d + t[0],       k * n2d + t[1],       k * n2d + t[2],
                                     (k + 1) * n2d + t[0], (k + 1) * n2d + t[1], (k + 1) * n2d + t[2]};
      for (auto tet : split_prism(prism)) {
        const double vol = signed_volume(mesh.coords(tet[0]), mesh.coords(tet[1]), mesh.coords(tet[2]),
                                         mesh.coords(tet[3]));
        if (vol < 0.0) std::swap(tet[1], tet[2]);
        tets.push_back(tet);
      }
    }
  }

  std::map<std::pair<int, int>, int> edge_nodes;
  mesh.elements.reserve(tets.size());
  for (const auto& tet : tets) {
    Tet10 el;
    for (int i = 0; i < 4; ++i) el.nodes[static_cast<std::size_t>(i)] = tet[static_cast<std::size_t>(i)];
    for (int e = 0; e < 6; ++e) {
      const auto [i, j] = kTet10Edges[static_cast<std::size_t>(e)];
      const int a = tet[static_cast<std::size_t>(i)];
      const int b = tet[static_cast<std::size_t>(j)];
      const auto key = std::minmax(a, b);
      auto it = edge_nodes.find(key);
      if (it == edge_nodes.end()) {
        const int id = mesh.num_nodes();
        mesh.vertices.push_back({id, midside(mesh.coords(key.first), mesh.coords(key.second))});
        it = edge_nodes.emplace(key, id).first;
      }
      el.nodes[static_cast<std::size_t>(4 + e)] = it->second;
    }
    mesh.elements.push_back(el);
  }

  // Boundary faces are those owned by a single element.
  std::map<FaceKey, std::pair<int, int>> owner;  // face -> (element, local face) or (-1,-1) if shared
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const auto& n = mesh.elements[static_cast<std::size_t>(e)].nodes;
    for (int f = 0; f < 4; ++f) {
      const FaceKey key = sorted_face(n[static_cast<std::size_t>(kTetFaces[f][0])],
                                      n[static_cast<std::size_t>(kTetFaces[f][1])],
                                      n[static_cast<std::size_t>(kTetFaces[f][2])]);
      auto [it, inserted] = owner.try_emplace(key, e, f);
      if (!inserted) it->second = {-1, -1};
    }
  }
  for (const auto& [key, ef] : owner) {
    const auto [e, f] = ef;
    if (e < 0) continue;
    const auto& n = mesh.elements[static_cast<std::size_t>(e)].nodes;
    const int l0 = kTetFaces[f][0], l1 = kTetFaces[f][1], l2 = kTetFaces[f][2];
    const std::array<Vec3, 3> pts{mesh.coords(n[static_cast<std::size_t>(l0)]),
                                  mesh.coords(n[static_cast<std::size_t>(l1)]),
                                  mesh.coords(n[static_cast<std::size_t>(l2)])};
    const std::string name = classify(pts);
    if (name.empty()) throw GeometryError("generated mesh has an unclassified boundary face");
    auto edge = [&](int a, int b) { return n[static_cast<std::size_t>(4 + local_edge(a, b))]; };
    mesh.facet_sets[name].push_back({n[static_cast<std::size_t>(l0)], n[static_cast<std::size_t>(l1)],
                                     n[static_cast<std::size_t>(l2)], edge(l0, l1), edge(l1, l2),
                                     edge(l2, l0)});
  }
  return mesh;
}

Vec3 plain_midpoint(const Vec3& a, const Vec3& b) { return 0.5 * (a + b); }

}  // namespace

// --- Mesh ------------------------------------------------------------------

std::array<Vec3, 4> Mesh::corner_coords(int element) const {
  const auto& n = elements[static_cast<std::size_t>(element)].nodes;
  return {coords(n[0]), coords(n[1]), coords(n[2]), coords(n[3])};
}

std::array<Vec3, 10> Mesh::node_coords(int element) const {
  const auto& n = elements[static_cast<std::size_t>(element)].nodes;
  std::array<Vec3, 10> x;
  for (std::size_t i = 0; i < 10; ++i) x[i] = coords(n[i]);
  return x;
}

std::vector<bool> Mesh::corner_mask() const {
  std::vector<bool> mask(vertices.size(), false);
  for (const auto& el : elements)
    for (int c : el.corners()) mask[static_cast<std::size_t>(c)] = true;
  return mask;
}

std::vector<int> Mesh::facet_set_nodes(const std::string& name) const {
  const auto it = facet_sets.find(name);
  if (it == facet_sets.end()) throw ConfigError("unknown facet set '" + name + "'");
  std::set<int> ids;
  for (const auto& f : it->second) ids.insert(f.begin(), f.end());
  return {ids.begin(), ids.end()};
}

std::vector<int> Mesh::facet_set_corner_nodes(const std::string& name) const {
  const auto it = facet_sets.find(name);
  if (it == facet_sets.end()) throw ConfigError("unknown facet set '" + name + "'");
  std::set<int> ids;
  for (const auto& f : it->second) ids.insert(f.begin(), f.begin() + 3);
  return {ids.begin(), ids.end()};
}

void Mesh::validate() const {
  const int n = num_nodes();
  for (int i = 0; i < n; ++i) {
    const auto& v = vertices[static_cast<std::size_t>(i)];
    if (v.id != i) throw ValidationError("vertex ids must be dense 0..N-1 (found " + std::to_string(v.id) +
                                         " at position " + std::to_string(i) + ")");
    if (!v.coords.allFinite()) throw ValidationError("vertex " + std::to_string(i) + " has non-finite coordinates");
  }
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  std::map<FaceKey, int> face_count;
  for (int e = 0; e < num_elements(); ++e) {
    const auto& el = elements[static_cast<std::size_t>(e)];
    for (int id : el.nodes) {
      if (id < 0 || id >= n)
        throw ValidationError("element " + std::to_string(e) + " references missing node " + std::to_string(id));
      used[static_cast<std::size_t>(id)] = true;
    }
    const auto c = corner_coords(e);
    if (!(signed_volume(c[0], c[1], c[2], c[3]) > 0.0))
      throw ValidationError("element " + std::to_string(e) + " has non-positive signed volume");
    for (const auto& f : kTetFaces)
      ++face_count[sorted_face(el.nodes[static_cast<std::size_t>(f[0])], el.nodes[static_cast<std::size_t>(f[1])],
                               el.nodes[static_cast<std::size_t>(f[2])])];
  }
  for (int i = 0; i < n; ++i)
    if (!used[static_cast<std::size_t>(i)]) throw ValidationError("node " + std::to_string(i) + " is not used by any element");
  for (const auto& [name, facets] : facet_sets) {
    for (const auto& f : facets) {
      for (int id : f)
        if (id < 0 || id >= n)
          throw ValidationError("facet set '" + name + "' references missing node " + std::to_string(id));
      const auto it = face_count.find(sorted_face(f[0], f[1], f[2]));
      if (it == face_count.end() || it->second != 1)
        throw ValidationError("facet set '" + name + "' contains a triangle that is not a boundary face of exactly one element");
    }
  }
  for (const auto& [name, ids] : node_sets)
    for (int id : ids)
      if (id < 0 || id >= n)
        throw ValidationError("node set '" + name + "' references missing node " + std::to_string(id));
}

// --- generation ------------------------------------------------------------

void MeshSpec::validate() const {
  if (shape == MeshShape::box) {
    if (!(lx > 0 && ly > 0 && lz > 0)) throw ConfigError("box dimensions must be positive");
    if (nx < 1 || ny < 1 || nz < 1) throw ConfigError("box subdivisions must be >= 1");
  } else {
    if (!(radius > 0 && height > 0)) throw ConfigError("cylinder radius and height must be positive");
    if (nc < 1 || nr < 1 || nz < 1) throw ConfigError("cylinder subdivisions must be >= 1");
    if (!(core_fraction > 0 && core_fraction < 1 / std::numbers::sqrt2))
      throw ConfigError("core fraction must lie in (0, 1/sqrt(2))");
  }
}

Mesh generate_box(const MeshSpec& spec) {
  if (spec.shape != MeshShape::box) throw ConfigError("generate_box requires shape == box");
  spec.validate();
  Planar planar;
  const int nx = spec.nx, ny = spec.ny;
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      planar.points.emplace_back(i == nx ? spec.lx : spec.lx * i / nx, j == ny ? spec.ly : spec.ly * j / ny);
  auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      planar.triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      planar.triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  const double tol = 1e-9 * std::max({spec.lx, spec.ly, spec.lz});
  auto classify = [&](const std::array<Vec3, 3>& p) -> std::string {
    auto all = [&](auto pred) { return pred(p[0]) && pred(p[1]) && pred(p[2]); };
    if (all([&](const Vec3& x) { return std::abs(x.z()) < tol; })) return "bottom";
    if (all([&](const Vec3& x) { return std::abs(x.z() - spec.lz) < tol; })) return "top";
    if (all([&](const Vec3& x) { return std::abs(x.x()) < tol; })) return "x0";
    if (all([&](const Vec3& x) { return std::abs(x.x() - spec.lx) < tol; })) return "x1";
    if (all([&](const Vec3& x) { return std::abs(x.y()) < tol; })) return "y0";
    if (all([&](const Vec3& x) { return std::abs(x.y() - spec.ly) < tol; })) return "y1";
    return {};
  };
  return extrude(planar, spec.nz, spec.lz, classify, plain_midpoint);
}

Mesh generate_quarter_cylinder(const MeshSpec& spec) {
  if (spec.shape != MeshShape::quarter_cylinder)
    throw ConfigError("generate_quarter_cylinder requires shape == quarter_cylinder");
  spec.validate();
  const int nc = spec.nc, nr = spec.nr;
  const double R = spec.radius;
  const double a = spec.core_fraction * R;
  constexpr double kQuarter = std::numbers::pi / 4;

  // Butterfly layout: a square core [0,a]^2 plus two ring blocks mapped onto
  // the arc, one on each side of the 45 degree diagonal.
  Planar planar;
  std::map<std::pair<int, int>, int> core_id;  // (i, j) in the core grid
  for (int j = 0; j <= nc; ++j) {
    for (int i = 0; i <= nc; ++i) {
      core_id[{i, j}] = static_cast<int>(planar.points.size());
      planar.points.emplace_back(i == nc ? a : a * i / nc, j == nc ? a : a * j / nc);
    }
  }
  auto arc_point = [&](double theta) {
    // Snap the symmetry planes exactly.
    if (theta == 0.0) return Vec2(R, 0.0);
    if (theta == 2 * kQuarter) return Vec2(0.0, R);
    return Vec2(R * std::cos(theta), R * std::sin(theta));
  };
  // Ring blocks: s runs along the core edge, t radially outwards. t == 0 is
  // the core edge itself.
  auto build_ring = [&](bool x_side) {
    std::vector<std::vector<int>> ids(static_cast<std::size_t>(nc + 1), std::vector<int>(static_cast<std::size_t>(nr + 1)));
    for (int s = 0; s <= nc; ++s) {
      const double frac = static_cast<double>(s) / nc;
      const Vec2 inner = x_side ? Vec2(a, s == nc ? a : a * frac) : Vec2(s == nc ? a : a * frac, a);
      const double theta = x_side ? (s == nc ? kQuarter : kQuarter * frac)
                                  : (s == 0 ? 2 * kQuarter : (s == nc ? kQuarter : 2 * kQuarter - kQuarter * frac));
      const Vec2 outer = arc_point(theta);
      for (int t = 0; t <= nr; ++t) {
        int id = -1;
        if (t == 0) {
          id = x_side ? core_id[{nc, s}] : core_id[{s, nc}];
        } else if (s == nc && !x_side) {
          id = -2;  // shared diagonal, filled below
        } else {
          id = static_cast<int>(planar.points.size());
          const double w = static_cast<double>(t) / nr;
          Vec2 p = t == nr ? outer : Vec2(inner + w * (outer - inner));
          if (!x_side && s == 0) p.x() = 0.0;
          if (x_side && s == 0) p.y() = 0.0;
          planar.points.push_back(p);
        }
        ids[static_cast<std::size_t>(s)][static_cast<std::size_t>(t)] = id;
      }
    }
    return ids;
  };
  auto ring_x = build_ring(true);
  auto ring_y = build_ring(false);
  for (int t = 0; t <= nr; ++t)
    ring_y[static_cast<std::size_t>(nc)][static_cast<std::size_t>(t)] = ring_x[static_cast<std::size_t>(nc)][static_cast<std::size_t>(t)];

  auto add_quad = [&](int p00, int p10, int p11, int p01) {
    // Cut along the shorter diagonal.
    const auto& P = planar.points;
    const double d1 = (P[static_cast<std::size_t>(p00)] - P[static_cast<std::size_t>(p11)]).squaredNorm();
    const double d2 = (P[static_cast<std::size_t>(p10)] - P[static_cast<std::size_t>(p01)]).squaredNorm();
    if (d1 <= d2) {
      planar.triangles.push_back({p00, p10, p11});
      planar.triangles.push_back({p00, p11, p01});
    } else {
      planar.triangles.push_back({p00, p10, p01});
      planar.triangles.push_back({p10, p11, p01});
    }
  };
  for (int j = 0; j < nc; ++j)
    for (int i = 0; i < nc; ++i)
      add_quad(core_id[{i, j}], core_id[{i + 1, j}], core_id[{i + 1, j + 1}], core_id[{i, j + 1}]);
  for (const auto* ring : {&ring_x, &ring_y})
    for (int s = 0; s < nc; ++s)
      for (int t = 0; t < nr; ++t) {
        const auto S = static_cast<std::size_t>(s), T = static_cast<std::size_t>(t);
        add_quad((*ring)[S][T], (*ring)[S][T + 1], (*ring)[S + 1][T + 1], (*ring)[S + 1][T]);
      }

  const double tol = 1e-9 * std::max(R, spec.height);
  auto on_arc = [&](const Vec3& x) { return std::abs(std::hypot(x.x(), x.y()) - R) < tol; };
  auto classify = [&](const std::array<Vec3, 3>& p) -> std::string {
    auto all = [&](auto pred) { return pred(p[0]) && pred(p[1]) && pred(p[2]); };
    if (all([&](const Vec3& x) { return std::abs(x.z()) < tol; })) return "bottom";
    if (all([&](const Vec3& x) { return std::abs(x.z() - spec.height) < tol; })) return "top";
    if (all([&](const Vec3& x) { return std::abs(x.x()) < tol; })) return "sym_x";
    if (all([&](const Vec3& x) { return std::abs(x.y()) < tol; })) return "sym_y";
    if (all(on_arc)) return "lateral";
    return {};
  };
  auto midside = [&](const Vec3& p, const Vec3& q) -> Vec3 {
    Vec3 m = 0.5 * (p + q);
    if (on_arc(p) && on_arc(q)) {
      const double r = std::hypot(m.x(), m.y());
      m.x() *= R / r;
      m.y() *= R / r;
    }
    return m;
  };
  return extrude(planar, spec.nz, spec.height, classify, midside);
}

Mesh generate_mesh(const MeshSpec& spec) {
  return spec.shape == MeshShape::box ? generate_box(spec) : generate_quarter_cylinder(spec);
}

// --- geometry --------------------------------------------------------------

double signed_volume(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  return (b - a).dot((c - a).cross(d - a)) / 6.0;
}

double circumsphere_radius(const std::array<Vec3, 4>& corners) {
  const Vec3& a = corners[0];
  const double vol = signed_volume(a, corners[1], corners[2], corners[3]);
  if (!(std::abs(vol) > kDegenerateVolume)) throw GeometryError("degenerate tetrahedron: circumsphere undefined");
  // |c - a|^2 = |c - x_i|^2  =>  2 (x_i - a) . (c - a) = |x_i - a|^2
  Mat3 M;
  Vec3 rhs;
  for (int i = 0; i < 3; ++i) {
    const Vec3 e = corners[static_cast<std::size_t>(i + 1)] - a;
    M.row(i) = 2.0 * e.transpose();
    rhs(i) = e.squaredNorm();
  }
  return M.partialPivLu().solve(rhs).norm();
}

double element_volume(const Mesh& mesh, int element) {
  const auto x = mesh.node_coords(element);
  double vol = 0.0;
  const auto& rule = quadrature_tet4pt();
  for (std::size_t q = 0; q < rule.points.size(); ++q) {
    const auto sh = shape_tet10(rule.points[q]);
    Mat3 J = Mat3::Zero();
    for (int a = 0; a < 10; ++a) J += x[static_cast<std::size_t>(a)] * sh.gradients.row(a);
    vol += rule.weights[q] * J.determinant();
  }
  return vol;
}

double mesh_volume(const Mesh& mesh) {
  double v = 0.0;
  for (int e = 0; e < mesh.num_elements(); ++e) v += element_volume(mesh, e);
  return v;
}

double line_coordinate(const Line& line, const Vec3& x) {
  return (x - line.point).dot(line.direction.normalized());
}

std::vector<int> reference_line_nodes(const Mesh& mesh, const Line& line, double tol) {
  if (!(line.direction.norm() > 0)) throw QueryError("reference line direction must be non-zero");
  const Vec3 d = line.direction.normalized();
  std::vector<std::pair<double, int>> hits;
  for (const auto& v : mesh.vertices) {
    const Vec3 r = v.coords - line.point;
    if (r.cross(d).norm() <= tol) hits.emplace_back(r.dot(d), v.id);
  }
  std::sort(hits.begin(), hits.end());
  hits.erase(std::unique(hits.begin(), hits.end(), [](const auto& l, const auto& r) { return l.second == r.second; }),
             hits.end());
  if (hits.size() < 2) {
    std::ostringstream msg;
    msg << "reference line matched " << hits.size() << " node(s); at least 2 are required";
    throw QueryError(msg.str());
  }
  std::vector<int> ids;
  ids.reserve(hits.size());
  for (const auto& h : hits) ids.push_back(h.second);
  return ids;
}

}  // namespace biphasic
