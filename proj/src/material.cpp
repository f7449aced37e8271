#include "biphasic/material.hpp"

#include <cmath>

#include "biphasic/errors.hpp"

namespace biphasic {

void NeoHookeParams::validate() const {
  if (!(mu > 0) || !std::isfinite(mu)) throw ConfigError("material.mu_mpa must be positive");
  if (!(lambda >= 0) || !std::isfinite(lambda)) throw ConfigError("material.lambda_mpa must be non-negative");
}

void PermeabilityParams::validate() const {
  if (!(k > 0) || !std::isfinite(k)) throw ConfigError("fluid.permeability_mm4_per_Ns must be positive");
}

Kinematics Kinematics::from_deformation_gradient(const Mat3& F) {
  Kinematics kin;
  kin.F = F;
  kin.J = F.determinant();
  kin.I_C = (F.transpose() * F).trace();
  return kin;
}

namespace {

void require_positive_jacobian(const Kinematics& kin) {
  if (!(kin.J > 0)) throw InvertedElementError("non-positive volume ratio J = " + std::to_string(kin.J));
}

}  // namespace

double strain_energy(const Kinematics& kin, const NeoHookeParams& p) {
  require_positive_jacobian(kin);
  const double lnJ = std::log(kin.J);
  return 0.5 * p.mu * (kin.I_C - 3.0) - p.mu * lnJ + 0.5 * p.lambda * lnJ * lnJ;
}

Mat3 cauchy_stress(const Kinematics& kin, const NeoHookeParams& p) {
  require_positive_jacobian(kin);
  const Mat3 b = kin.F * kin.F.transpose();
  const double lnJ = std::log(kin.J);
  return (p.mu / kin.J) * (b - Mat3::Identity()) + (p.lambda * lnJ / kin.J) * Mat3::Identity();
}

Voigt6 spatial_tangent(const Kinematics& kin, const NeoHookeParams& p) {
  require_positive_jacobian(kin);
  const double lnJ = std::log(kin.J);
  const double lam = p.lambda / kin.J;
  const double mu = (p.mu - p.lambda * lnJ) / kin.J;
  Voigt6 D = Voigt6::Zero();
  D.topLeftCorner<3, 3>().setConstant(lam);
  D.topLeftCorner<3, 3>().diagonal().array() += 2.0 * mu;
  D.bottomRightCorner<3, 3>().diagonal().setConstant(mu);
  return D;
}

StressTangent stress_and_tangent(const Kinematics& kin, const NeoHookeParams& p) {
  return {cauchy_stress(kin, p), spatial_tangent(kin, p)};
}

VoigtVec stress_to_voigt(const Mat3& s) {
  VoigtVec v;
  for (int i = 0; i < 6; ++i) v(i) = s(kVoigtIndex[i][0], kVoigtIndex[i][1]);
  return v;
}

Mat3 voigt_to_stress(const VoigtVec& v) {
  Mat3 s;
  for (int i = 0; i < 6; ++i) {
    s(kVoigtIndex[i][0], kVoigtIndex[i][1]) = v(i);
    s(kVoigtIndex[i][1], kVoigtIndex[i][0]) = v(i);
  }
  return s;
}

Voigt6 tensor4_to_voigt(const Tensor4& c) {
  Voigt6 d;
  for (int I = 0; I < 6; ++I)
    for (int K = 0; K < 6; ++K) {
      const int i = kVoigtIndex[I][0], j = kVoigtIndex[I][1];
      const int k = kVoigtIndex[K][0], l = kVoigtIndex[K][1];
      d(I, K) = c(i * 27 + j * 9 + k * 3 + l);
    }
  return d;
}

Tensor4 voigt_to_tensor4(const Voigt6& d) {
  auto voigt = [](int i, int j) {
    for (int I = 0; I < 6; ++I)
      if ((kVoigtIndex[I][0] == i && kVoigtIndex[I][1] == j) || (kVoigtIndex[I][0] == j && kVoigtIndex[I][1] == i))
        return I;
    return -1;
  };
  Tensor4 c;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) c(i * 27 + j * 9 + k * 3 + l) = d(voigt(i, j), voigt(k, l));
  return c;
}

}  // namespace biphasic
