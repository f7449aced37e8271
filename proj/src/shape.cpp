#include <cmath>

#include "biphasic/fem.hpp"

namespace biphasic {

namespace {

// Gradients of the barycentric coordinates with respect to (xi, eta, zeta).
const Eigen::Matrix<double, 4, 3>& barycentric_gradients() {
  static const Eigen::Matrix<double, 4, 3> g = [] {
    Eigen::Matrix<double, 4, 3> m;
    m << -1, -1, -1,  //
        1, 0, 0,      //
        0, 1, 0,      //
        0, 0, 1;
    return m;
  }();
  return g;
}

Eigen::Vector4d barycentric(const Vec3& xi) { return {1.0 - xi.sum(), xi.x(), xi.y(), xi.z()}; }

}  // namespace

Tet10Shape shape_tet10(const Vec3& xi) {
  const Eigen::Vector4d L = barycentric(xi);
  const auto& dL = barycentric_gradients();
  Tet10Shape s;
  for (int i = 0; i < 4; ++i) {
    s.values(i) = L(i) * (2.0 * L(i) - 1.0);
    s.gradients.row(i) = (4.0 * L(i) - 1.0) * dL.row(i);
  }
  for (int e = 0; e < 6; ++e) {
    const auto [i, j] = kTet10Edges[static_cast<std::size_t>(e)];
    s.values(4 + e) = 4.0 * L(i) * L(j);
    s.gradients.row(4 + e) = 4.0 * (L(j) * dL.row(i) + L(i) * dL.row(j));
  }
  return s;
}

Tet4Shape shape_tet4(const Vec3& xi) {
  return {barycentric(xi), barycentric_gradients()};
}

const std::array<Vec3, 10>& tet10_reference_nodes() {
  static const std::array<Vec3, 10> nodes = [] {
    std::array<Vec3, 10> n{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)};
    for (std::size_t e = 0; e < 6; ++e) {
      const auto [i, j] = kTet10Edges[e];
      n[4 + e] = 0.5 * (n[static_cast<std::size_t>(i)] + n[static_cast<std::size_t>(j)]);
    }
    return n;
  }();
  return nodes;
}

const QuadratureRule& quadrature_tet4pt() {
  static const QuadratureRule rule = [] {
    // (5 + 3 sqrt 5)/20 and (5 - sqrt 5)/20
    const double alpha = (5.0 + 3.0 * std::sqrt(5.0)) / 20.0;
    const double beta = (5.0 - std::sqrt(5.0)) / 20.0;
    QuadratureRule r;
    // Reference coordinates are the last three barycentrics.
    r.points = {Vec3(beta, beta, beta), Vec3(alpha, beta, beta), Vec3(beta, alpha, beta), Vec3(beta, beta, alpha)};
    r.weights.assign(4, 1.0 / 24.0);
    return r;
  }();
  return rule;
}

Tri6Shape shape_tri6(double r, double s) {
  const Eigen::Vector3d L(1.0 - r - s, r, s);
  Eigen::Matrix<double, 3, 2> dL;
  dL << -1, -1, 1, 0, 0, 1;
  constexpr int kEdges[3][2] = {{0, 1}, {1, 2}, {2, 0}};
  Tri6Shape sh;
  for (int i = 0; i < 3; ++i) {
    sh.values(i) = L(i) * (2.0 * L(i) - 1.0);
    sh.gradients.row(i) = (4.0 * L(i) - 1.0) * dL.row(i);
  }
  for (int e = 0; e < 3; ++e) {
    const int i = kEdges[e][0], j = kEdges[e][1];
    sh.values(3 + e) = 4.0 * L(i) * L(j);
    sh.gradients.row(3 + e) = 4.0 * (L(j) * dL.row(i) + L(i) * dL.row(j));
  }
  return sh;
}

Eigen::Matrix<double, 18, 1> facet_traction_load(const std::array<Vec3, 6>& x, const Vec3& traction) {
  static const double pts[3][2] = {{1.0 / 6, 1.0 / 6}, {2.0 / 3, 1.0 / 6}, {1.0 / 6, 2.0 / 3}};
  Eigen::Matrix<double, 18, 1> f = Eigen::Matrix<double, 18, 1>::Zero();
  for (const auto& q : pts) {
    const auto sh = shape_tri6(q[0], q[1]);
    Vec3 dr = Vec3::Zero(), ds = Vec3::Zero();
    for (std::size_t a = 0; a < 6; ++a) {
      dr += sh.gradients(static_cast<int>(a), 0) * x[a];
      ds += sh.gradients(static_cast<int>(a), 1) * x[a];
    }
    const double da = dr.cross(ds).norm() / 6.0;
    for (int a = 0; a < 6; ++a) f.segment<3>(3 * a) += sh.values(a) * da * traction;
  }
  return f;
}

}  // namespace biphasic
