#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "biphasic/material.hpp"
#include "biphasic/mesh.hpp"

namespace biphasic {

// Reference tetrahedron: corners (0,0,0), (1,0,0), (0,1,0), (0,0,1), so the
// barycentric coordinates are (1 - xi - eta - zeta, xi, eta, zeta).

struct Tet10Shape {
  Eigen::Matrix<double, 10, 1> values;
  Eigen::Matrix<double, 10, 3> gradients;  // d/dxi
};

struct Tet4Shape {
  Eigen::Matrix<double, 4, 1> values;
  Eigen::Matrix<double, 4, 3> gradients;
};

/// Quadratic Lagrange basis in the kTet10Edges node order.
Tet10Shape shape_tet10(const Vec3& xi);
/// Linear Lagrange basis on the four corners.
Tet4Shape shape_tet4(const Vec3& xi);

/// Reference coordinates of the ten Tet10 nodes.
const std::array<Vec3, 10>& tet10_reference_nodes();

struct QuadratureRule {
  std::vector<Vec3> points;  // reference coordinates (xi, eta, zeta)
  std::vector<double> weights;
};

/// Degree-2 four-point rule, weights 1/24 each.
const QuadratureRule& quadrature_tet4pt();

/// Six-node triangle on the reference triangle (0,0), (1,0), (0,1); node
/// order matches Facet6.
struct Tri6Shape {
  Eigen::Matrix<double, 6, 1> values;
  Eigen::Matrix<double, 6, 2> gradients;
};
Tri6Shape shape_tri6(double r, double s);

/// Consistent nodal forces (18 = 6 nodes x 3) of a constant traction over a
/// Tri6 facet, integrated on the given node positions.
Eigen::Matrix<double, 18, 1> facet_traction_load(const std::array<Vec3, 6>& x, const Vec3& traction);

struct GlsParams {
  double tau = 0.0;  // N/mm^2
  bool enabled = false;

  double effective_tau() const { return enabled ? tau : 0.0; }
};

/// tau = h^2 / (4 k dt). Throws ConfigError on non-positive input.
double tau_gls(double h, double k, double dt);

using Vec30 = Eigen::Matrix<double, 30, 1>;
using Mat30 = Eigen::Matrix<double, 30, 30>;
using Mat30x4 = Eigen::Matrix<double, 30, 4>;

/// Element geometry and state. Displacement dofs are node-major (3a + i).
struct ElementInput {
  std::array<Vec3, 10> X;  // reference node positions, mm
  Vec30 u = Vec30::Zero();
  Vec30 u_prev = Vec30::Zero();
  Eigen::Vector4d p = Eigen::Vector4d::Zero();
  int element_id = -1;
};

/// Element contributions. Sign conventions (T = sigma - p I):
///   f_int_u = int B^T sigma - Bdiv^T p dv          (momentum residual)
///   f_int_p = int Np div(u - u_prev)/dt + k grad Np . grad p dv   (mass residual rate)
///   k_up    = -int Bdiv^T Np dv
///   k_pp    =  int k grad Np^T grad Np dv
///   k_uu_gls = int Bdiv^T tau Bdiv dv, f_gls_u = k_uu_gls (u - u_prev)
/// The coupled system multiplies the mass rows by -dt, which makes
/// [[k_uu + k_uu_gls, k_up], [k_up^T, -dt k_pp]] the symmetric tangent.
struct ElementMatrices {
  Mat30 k_uu = Mat30::Zero();
  Mat30x4 k_up = Mat30x4::Zero();
  Eigen::Matrix4d k_pp = Eigen::Matrix4d::Zero();
  Mat30 k_uu_gls = Mat30::Zero();
  Vec30 f_int_u = Vec30::Zero();
  Eigen::Vector4d f_int_p = Eigen::Vector4d::Zero();
  Vec30 f_gls_u = Vec30::Zero();
  double min_J = 0.0;
  double max_J = 0.0;
};

/// Throws InvertedElementError when the current-configuration Jacobian or
/// det F is non-positive at a quadrature point.
ElementMatrices element_matrices(const ElementInput& el, const NeoHookeParams& mat,
                                 const PermeabilityParams& perm, const GlsParams& gls, double dt);

}  // namespace biphasic
