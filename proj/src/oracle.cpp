#include "biphasic/oracle.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "biphasic/errors.hpp"
#include "biphasic/fem.hpp"

namespace biphasic {

void TerzaghiParams::validate() const {
  if (!(H > 0) || !(sigma0 >= 0) || !(M > 0) || !(k > 0))
    throw ConfigError("Terzaghi parameters must be positive");
  if (n_terms < 10) throw ConfigError("Terzaghi series needs at least 10 terms");
}

double terzaghi_pressure(double z, double t, const TerzaghiParams& prm) {
  prm.validate();
  if (!(t > 0)) throw ConfigError("Terzaghi pressure is defined for t > 0");
  if (z < -1e-12 * prm.H || z > prm.H * (1 + 1e-12)) throw ConfigError("z outside the column");
  const double pi = std::numbers::pi;
  const double cv = prm.cv();
  double sum = 0.0;
  for (int i = 0; i < prm.n_terms; ++i) {
    const int m = 2 * i + 1;
    const double a = m * pi / (2.0 * prm.H);
    sum += std::sin(a * (prm.H - z)) * std::exp(-a * a * cv * t) / m;
  }
  return 4.0 * prm.sigma0 / pi * sum;
}

double terzaghi_tail_bound(double t, const TerzaghiParams& prm) {
  const double pi = std::numbers::pi;
  const int next = 2 * prm.n_terms + 1;  // first omitted odd index
  const double a = next * pi / (2.0 * prm.H);
  return 4.0 * prm.sigma0 / pi * std::exp(-a * a * prm.cv() * t) / next;
}

double terzaghi_average_consolidation(double t, const TerzaghiParams& prm) {
  prm.validate();
  if (t <= 0) return 0.0;
  const double pi = std::numbers::pi;
  double sum = 0.0;
  for (int i = 0; i < prm.n_terms; ++i) {
    const int m = 2 * i + 1;
    const double a = m * pi / (2.0 * prm.H);
    sum += 8.0 / (m * m * pi * pi) * std::exp(-a * a * prm.cv() * t);
  }
  return 1.0 - sum;
}

double terzaghi_time_for_consolidation(double U, const TerzaghiParams& prm) {
  if (!(U > 0 && U < 1)) throw ConfigError("degree of consolidation must lie in (0, 1)");
  double lo = 0.0, hi = prm.H * prm.H / prm.cv();
  while (terzaghi_average_consolidation(hi, prm) < U) hi *= 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-14 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (terzaghi_average_consolidation(mid, prm) < U ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<Mat3> random_deformation_gradients(int count, std::uint64_t seed, double j_min, double j_max) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> entry(-0.3, 0.3);
  std::uniform_real_distribution<double> jdist(j_min, j_max);
  std::vector<Mat3> out;
  while (static_cast<int>(out.size()) < count) {
    Mat3 F = Mat3::Identity();
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) F(i, j) += entry(rng);
    const double det = F.determinant();
    if (det < 0.2) continue;
    out.push_back(std::cbrt(jdist(rng) / det) * F);
  }
  return out;
}

namespace {

double energy(const Mat3& F, const NeoHookeParams& prm) {
  // Written out directly from the invariants.
  const double J = F.determinant();
  const double lnJ = std::log(J);
  return 0.5 * prm.mu * (F.squaredNorm() - 3.0) - prm.mu * lnJ + 0.5 * prm.lambda * lnJ * lnJ;
}

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

Mat3 fd_first_piola(const Mat3& F, const NeoHookeParams& prm, double step) {
  Mat3 P;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      Mat3 Fp = F, Fm = F;
      Fp(i, j) += step;
      Fm(i, j) -= step;
      P(i, j) = (energy(Fp, prm) - energy(Fm, prm)) / (2.0 * step);
    }
  return P;
}

double fd_check_stress(const NeoHookeParams& prm, int trials, std::uint64_t seed, double step,
                       const StressFunction& stress) {
  if (trials < 1) throw ConfigError("trials must be >= 1");
  double worst = 0.0;
  for (const Mat3& F : random_deformation_gradients(trials, seed)) {
    const Mat3 sigma_fd = fd_first_piola(F, prm, step) * F.transpose() / F.determinant();
    const Mat3 sigma = stress(Kinematics::from_deformation_gradient(F), prm);
    const double scale = std::max(max_abs(sigma_fd), 1e-12);
    worst = std::max(worst, max_abs(sigma - sigma_fd) / scale);
  }
  return worst;
}

double fd_check_tangent(const NeoHookeParams& prm, int trials, std::uint64_t seed, double step,
                        const TangentFunction& tangent) {
  if (trials < 1) throw ConfigError("trials must be >= 1");
  // Voigt order 11, 22, 33, 12, 23, 13 with engineering shear.
  static constexpr int kPairs[6][2] = {{0, 0}, {1, 1}, {2, 2}, {0, 1}, {1, 2}, {0, 2}};
  auto kirchhoff = [&](const Mat3& F) {
    return Mat3(F.determinant() * cauchy_stress(Kinematics::from_deformation_gradient(F), prm));
  };
  auto to_voigt = [](const Mat3& s) {
    Eigen::Matrix<double, 6, 1> v;
    for (int a = 0; a < 6; ++a) v(a) = s(kPairs[a][0], kPairs[a][1]);
    return v;
  };
  double worst = 0.0;
  for (const Mat3& F : random_deformation_gradients(trials, seed)) {
    const double J = F.determinant();
    const Mat3 tau = kirchhoff(F);
    const Voigt6 c = tangent(Kinematics::from_deformation_gradient(F), prm);
    Voigt6 c_fd;
    for (int col = 0; col < 6; ++col) {
      const int k = kPairs[col][0], l = kPairs[col][1];
      Mat3 d = Mat3::Zero();
      d(k, l) += 0.5;
      d(l, k) += 0.5;
      const Mat3 Fp = (Mat3::Identity() + step * d) * F;
      const Mat3 Fm = (Mat3::Identity() - step * d) * F;
      const Mat3 dtau = (kirchhoff(Fp) - kirchhoff(Fm)) / (2.0 * step);
      c_fd.col(col) = to_voigt((dtau - d * tau - tau * d) / J);
    }
    worst = std::max(worst, max_abs(c - c_fd) / std::max(max_abs(c_fd), 1e-12));
  }
  return worst;
}

Eigen::MatrixXd dense_assembly_oracle(const Mesh& mesh, const SolutionState& state, const SolutionState& prev,
                                      const PhysicalModel& model, double dt, Eigen::VectorXd* rhs) {
  const int nn = mesh.num_nodes();
  std::vector<int> pidx(static_cast<std::size_t>(nn), -1);
  for (const auto& el : mesh.elements)
    for (std::size_t a = 0; a < 4; ++a) pidx[static_cast<std::size_t>(el.nodes[a])] = 0;
  int np = 0;
  for (int n = 0; n < nn; ++n)
    if (pidx[static_cast<std::size_t>(n)] == 0) pidx[static_cast<std::size_t>(n)] = np++;
  const int nu = 3 * nn;
  const int ndof = nu + np;
  if (ndof > kDenseOracleMaxDofs)
    throw ConfigError("dense oracle refuses " + std::to_string(ndof) + " dofs (limit " +
                      std::to_string(kDenseOracleMaxDofs) + ")");

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(ndof, ndof);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(ndof);
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const auto& el = mesh.elements[static_cast<std::size_t>(e)];
    ElementInput in;
    in.element_id = e;
    int idx[34];
    for (int a = 0; a < 10; ++a) {
      const int node = el.nodes[static_cast<std::size_t>(a)];
      in.X[static_cast<std::size_t>(a)] = mesh.vertices[static_cast<std::size_t>(node)].coords;
      for (int i = 0; i < 3; ++i) {
        idx[3 * a + i] = 3 * node + i;
        in.u(3 * a + i) = state.u(3 * node + i);
        in.u_prev(3 * a + i) = prev.u(3 * node + i);
      }
    }
    for (int a = 0; a < 4; ++a) {
      const int node = el.nodes[static_cast<std::size_t>(a)];
      idx[30 + a] = nu + pidx[static_cast<std::size_t>(node)];
      in.p(a) = state.p(pidx[static_cast<std::size_t>(node)]);
    }

    GlsParams gls;
    gls.enabled = model.gls_enabled;
    if (gls.enabled) {
      // Circumcentre from the closed-form vector expression.
      const Vec3& o = in.X[0];
      const Vec3 a = in.X[1] - o, bb = in.X[2] - o, c = in.X[3] - o;
      const Vec3 centre = (a.squaredNorm() * bb.cross(c) + bb.squaredNorm() * c.cross(a) + c.squaredNorm() * a.cross(bb)) /
                          (2.0 * a.dot(bb.cross(c)));
      const double h = centre.norm();
      gls.tau = h * h / (4.0 * model.permeability.k * dt);
    }
    const ElementMatrices m = element_matrices(in, model.material, model.permeability, gls, dt);
    for (int i = 0; i < 30; ++i) {
      for (int j = 0; j < 30; ++j) A(idx[i], idx[j]) += m.k_uu(i, j) + m.k_uu_gls(i, j);
      for (int j = 0; j < 4; ++j) {
        A(idx[i], idx[30 + j]) += m.k_up(i, j);
        A(idx[30 + j], idx[i]) += m.k_up(i, j);
      }
      b(idx[i]) -= m.f_int_u(i) + m.f_gls_u(i);
    }
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) A(idx[30 + i], idx[30 + j]) -= dt * m.k_pp(i, j);
      b(idx[30 + i]) += dt * m.f_int_p(i);
    }
  }
  if (rhs) *rhs = b;
  return A;
}

}  // namespace biphasic
