#include <cmath>
#include <limits>

#include "biphasic/errors.hpp"
#include "biphasic/fem.hpp"

namespace biphasic {

double tau_gls(double h, double k, double dt) {
  if (!(h > 0) || !(k > 0) || !(dt > 0)) throw ConfigError("tau_gls requires h, k and dt to be positive");
  return h * h / (4.0 * k * dt);
}

ElementMatrices element_matrices(const ElementInput& el, const NeoHookeParams& mat, const PermeabilityParams& perm,
                                 const GlsParams& gls, double dt) {
  if (!(dt > 0)) throw ConfigError("time increment must be positive");
  const double tau = gls.effective_tau();
  const double k = perm.k;

  Eigen::Matrix<double, 10, 3> X, x;
  for (int a = 0; a < 10; ++a) {
    X.row(a) = el.X[static_cast<std::size_t>(a)].transpose();
    x.row(a) = X.row(a) + el.u.segment<3>(3 * a).transpose();
  }
  const Vec30 du = el.u - el.u_prev;

  ElementMatrices m;
  m.min_J = std::numeric_limits<double>::infinity();
  m.max_J = -std::numeric_limits<double>::infinity();

  const auto& rule = quadrature_tet4pt();
  for (std::size_t q = 0; q < rule.points.size(); ++q) {
    const auto sh = shape_tet10(rule.points[q]);
    const auto shp = shape_tet4(rule.points[q]);
    const Mat3 dX = X.transpose() * sh.gradients;  // dX/dxi
    const Mat3 dx = x.transpose() * sh.gradients;  // dx/dxi
    const double det_dx = dx.determinant();
    const int qp = static_cast<int>(q);
    if (!(det_dx > 0))
      throw InvertedElementError("element " + std::to_string(el.element_id) + " inverted at quadrature point " +
                                     std::to_string(qp),
                                 el.element_id, qp);
    const Kinematics kin = Kinematics::from_deformation_gradient(dx * dX.inverse());
    if (!(kin.J > 0))
      throw InvertedElementError("element " + std::to_string(el.element_id) + " has J <= 0 at quadrature point " +
                                     std::to_string(qp),
                                 el.element_id, qp);
    m.min_J = std::min(m.min_J, kin.J);
    m.max_J = std::max(m.max_J, kin.J);

    const Mat3 dxi_dx = dx.inverse();
    const Eigen::Matrix<double, 10, 3> dN = sh.gradients * dxi_dx;
    const Eigen::Matrix<double, 4, 3> dNp = shp.gradients * dxi_dx;
    const double dv = rule.weights[q] * det_dx;

    const StressTangent st = stress_and_tangent(kin, mat);
    const VoigtVec sigma_v = stress_to_voigt(st.sigma);

    Eigen::Matrix<double, 6, 30> B = Eigen::Matrix<double, 6, 30>::Zero();
    Vec30 b_div;
    for (int a = 0; a < 10; ++a) {
      const double gx = dN(a, 0), gy = dN(a, 1), gz = dN(a, 2);
      const int c = 3 * a;
      B(0, c) = gx;
      B(1, c + 1) = gy;
      B(2, c + 2) = gz;
      B(3, c) = gy;
      B(3, c + 1) = gx;
      B(4, c + 1) = gz;
      B(4, c + 2) = gy;
      B(5, c) = gz;
      B(5, c + 2) = gx;
      b_div.segment<3>(c) = dN.row(a).transpose();
    }

    const double p_q = shp.values.dot(el.p);
    const Vec3 grad_p = dNp.transpose() * el.p;

    m.k_uu.noalias() += (B.transpose() * (st.D * dv)) * B;
    // Initial-stress terms of the total stress sigma - p I.
    const Eigen::Matrix<double, 10, 3> dN_sigma = dN * st.sigma;
    for (int a = 0; a < 10; ++a) {
      for (int b = 0; b < 10; ++b) {
        const double g = dN_sigma.row(a).dot(dN.row(b)) * dv;
        Mat3 blk = g * Mat3::Identity();
        blk.noalias() -= (p_q * dv) * (dN.row(a).transpose() * dN.row(b) - dN.row(b).transpose() * dN.row(a));
        m.k_uu.block<3, 3>(3 * a, 3 * b) += blk;
      }
    }
    m.k_up.noalias() -= (b_div * dv) * shp.values.transpose();
    m.k_pp.noalias() += (k * dv) * dNp * dNp.transpose();
    if (tau > 0) m.k_uu_gls.noalias() += (tau * dv) * b_div * b_div.transpose();

    m.f_int_u.noalias() += (B.transpose() * sigma_v - b_div * p_q) * dv;
    m.f_int_p.noalias() += (shp.values * (b_div.dot(du) / dt) + k * dNp * grad_p) * dv;
  }
  m.f_gls_u = m.k_uu_gls * du;
  return m;
}

}  // namespace biphasic
