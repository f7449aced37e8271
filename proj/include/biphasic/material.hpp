#pragma once

#include <Eigen/Dense>

namespace biphasic {

using Mat3 = Eigen::Matrix3d;
using Voigt6 = Eigen::Matrix<double, 6, 6>;
using VoigtVec = Eigen::Matrix<double, 6, 1>;

// Voigt convention used throughout: (11, 22, 33, 12, 23, 13). Stress vectors
// hold tensor components; strain vectors and B-matrices use engineering shear
// (gamma_12 = 2 eps_12), so sigma_voigt = D * strain_voigt.
inline constexpr int kVoigtIndex[6][2] = {{0, 0}, {1, 1}, {2, 2}, {0, 1}, {1, 2}, {0, 2}};

/// Compressible Neo-Hooke solid skeleton, MPa.
struct NeoHookeParams {
  double lambda = 0.2;
  double mu = 0.5;

  void validate() const;
};

/// Constant isotropic Darcy permeability, mm^4 N^-1 s^-1.
struct PermeabilityParams {
  double k = 1e-3;

  void validate() const;
};

struct Kinematics {
  Mat3 F = Mat3::Identity();
  double J = 1.0;
  double I_C = 3.0;

  static Kinematics from_deformation_gradient(const Mat3& F);
};

struct StressTangent {
  Mat3 sigma = Mat3::Zero();
  Voigt6 D = Voigt6::Zero();
};

/// Phi = mu/2 (I_C - 3) - mu ln J + lambda/2 (ln J)^2, per unit reference volume.
double strain_energy(const Kinematics& kin, const NeoHookeParams& p);

/// sigma = (mu/J)(b - I) + (lambda/J) ln J I.
Mat3 cauchy_stress(const Kinematics& kin, const NeoHookeParams& p);

/// Spatial tangent c = lambda' I(x)I + 2 mu' I_sym, with lambda' = lambda/J and
/// mu' = (mu - lambda ln J)/J, in Voigt form.
Voigt6 spatial_tangent(const Kinematics& kin, const NeoHookeParams& p);

StressTangent stress_and_tangent(const Kinematics& kin, const NeoHookeParams& p);

VoigtVec stress_to_voigt(const Mat3& s);
Mat3 voigt_to_stress(const VoigtVec& v);

/// Fourth-order tensor stored as c[i][j][k][l] flattened (i*27 + j*9 + k*3 + l).
using Tensor4 = Eigen::Matrix<double, 81, 1>;
Voigt6 tensor4_to_voigt(const Tensor4& c);
/// Inverse of tensor4_to_voigt for tensors with minor symmetries.
Tensor4 voigt_to_tensor4(const Voigt6& d);

}  // namespace biphasic
