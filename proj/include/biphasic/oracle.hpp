#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "biphasic/material.hpp"
#include "biphasic/mesh.hpp"
#include "biphasic/solver.hpp"

namespace biphasic {

// Independent references for tests and the verify command.

/// One-dimensional consolidation of a column drained at z = H, sealed at z = 0.
struct TerzaghiParams {
  double H = 8.0;        // mm
  double sigma0 = 0.01;  // MPa
  double M = 1.2;        // constrained modulus lambda + 2 mu, MPa
  double k = 1e-3;       // mm^4/(N s)
  int n_terms = 200;     // odd terms summed

  void validate() const;
  double cv() const { return k * M; }
};

/// Pore pressure p(z, t) from the truncated series. Throws ConfigError for
/// t <= 0 or z outside [0, H].
double terzaghi_pressure(double z, double t, const TerzaghiParams& prm);
/// Bound on the magnitude of the neglected series tail.
double terzaghi_tail_bound(double t, const TerzaghiParams& prm);
/// Average degree of consolidation U(t) in [0, 1).
double terzaghi_average_consolidation(double t, const TerzaghiParams& prm);
/// Time at which U(t) reaches the given fraction (bisection).
double terzaghi_time_for_consolidation(double U, const TerzaghiParams& prm);
/// Final settlement sigma0 H / M.
inline double terzaghi_final_settlement(const TerzaghiParams& prm) { return prm.sigma0 * prm.H / prm.M; }

/// Deformation gradients with J uniformly in [j_min, j_max] (seeded).
std::vector<Mat3> random_deformation_gradients(int count, std::uint64_t seed, double j_min = 0.7, double j_max = 1.4);

/// Central-difference first Piola stress dPhi/dF.
Mat3 fd_first_piola(const Mat3& F, const NeoHookeParams& prm, double step = 1e-6);

using StressFunction = std::function<Mat3(const Kinematics&, const NeoHookeParams&)>;
using TangentFunction = std::function<Voigt6(const Kinematics&, const NeoHookeParams&)>;

/// Worst relative error of the Cauchy stress against P F^T / J from the
/// differentiated energy, over `trials` random states.
double fd_check_stress(const NeoHookeParams& prm, int trials, std::uint64_t seed = 1, double step = 1e-6,
                       const StressFunction& stress = cauchy_stress);

/// Worst relative error of the spatial tangent against the central difference
/// of the Kirchhoff stress along F -> (I + eps d) F, minus the Jaumann-type
/// correction, over `trials` random states.
double fd_check_tangent(const NeoHookeParams& prm, int trials, std::uint64_t seed = 1, double step = 1e-5,
                        const TangentFunction& tangent = spatial_tangent);

/// Largest number of dofs the dense oracle accepts.
inline constexpr int kDenseOracleMaxDofs = 200;

/// Dense assembly by explicit index-by-index scatter with its own numbering
/// and element sizes. Throws ConfigError above kDenseOracleMaxDofs.
Eigen::MatrixXd dense_assembly_oracle(const Mesh& mesh, const SolutionState& state, const SolutionState& prev,
                                      const PhysicalModel& model, double dt, Eigen::VectorXd* rhs = nullptr);

}  // namespace biphasic
