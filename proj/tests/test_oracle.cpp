#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "biphasic/errors.hpp"
#include "biphasic/fem.hpp"
#include "biphasic/oracle.hpp"
#include "biphasic/solver.hpp"

using namespace biphasic;

namespace {

const NeoHookeParams kMat{0.2, 0.5};

TerzaghiParams series(int terms) {
  TerzaghiParams p;
  p.n_terms = terms;
  return p;
}

Mesh box(int nx, int nz) {
  MeshSpec s;
  s.shape = MeshShape::box;
  s.nx = nx;
  s.nz = nz;
  s.lx = nx;
  s.lz = nz;
  return generate_box(s);
}

// Keeps only the listed elements and the nodes they use.
Mesh subset(const Mesh& m, std::vector<int> keep) {
  Mesh out;
  std::vector<int> map(static_cast<std::size_t>(m.num_nodes()), -1);
  for (int e : keep)
    for (int n : m.elements[static_cast<std::size_t>(e)].nodes)
      if (map[static_cast<std::size_t>(n)] < 0) {
        map[static_cast<std::size_t>(n)] = out.num_nodes();
        out.vertices.push_back({out.num_nodes(), m.coords(n)});
      }
  for (int e : keep) {
    Tet10 el = m.elements[static_cast<std::size_t>(e)];
    for (int& n : el.nodes) n = map[static_cast<std::size_t>(n)];
    out.elements.push_back(el);
  }
  return out;
}

void randomize(SolutionState& s, unsigned seed, double scale) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> d(-scale, scale);
  for (int i = 0; i < s.u.size(); ++i) s.u(i) = d(rng);
  for (int i = 0; i < s.p.size(); ++i) s.p(i) = d(rng);
}

}  // namespace

TEST(TerzaghiSeries, DrainedBoundaryIsZero) {
  for (double t : {1.0, 100.0, 1e4}) EXPECT_NEAR(terzaghi_pressure(8.0, t, series(200)), 0.0, 1e-15);
}

TEST(TerzaghiSeries, ConvergedSeriesIsStable) {
  const auto coarse = series(50), fine = series(200);
  const double t50 = terzaghi_time_for_consolidation(0.5, fine);
  for (double z : {0.0, 2.0, 4.0, 6.0})
    EXPECT_NEAR(terzaghi_pressure(z, t50, coarse), terzaghi_pressure(z, t50, fine), 1e-10);
}

TEST(TerzaghiSeries, EarlyTimeRecoversInitialLoad) {
  const auto prm = series(500);
  const double t = 1e-6 * prm.H * prm.H / prm.cv();
  for (double z : {0.0, 2.0, 4.0, 7.0}) EXPECT_NEAR(terzaghi_pressure(z, t, prm), prm.sigma0, 0.02 * prm.sigma0);
}

TEST(TerzaghiSeries, LateTimeDecaysAndTailBoundHolds) {
  const auto prm = series(200);
  EXPECT_LT(terzaghi_pressure(0.0, 1e7, prm), 1e-12);
  const double t = terzaghi_time_for_consolidation(0.2, prm);
  const double diff = std::abs(terzaghi_pressure(1.0, t, prm) - terzaghi_pressure(1.0, t, series(2000)));
  EXPECT_LE(diff, terzaghi_tail_bound(t, prm) + 1e-18);
}

TEST(TerzaghiSeries, ConsolidationDegreeInverts) {
  const auto prm = series(200);
  for (double u : {0.2, 0.5, 0.8}) {
    const double t = terzaghi_time_for_consolidation(u, prm);
    EXPECT_NEAR(terzaghi_average_consolidation(t, prm), u, 1e-10);
  }
  EXPECT_DOUBLE_EQ(terzaghi_final_settlement(prm), prm.sigma0 * prm.H / prm.M);
}

TEST(TerzaghiSeries, InvalidInputThrows) {
  EXPECT_THROW(terzaghi_pressure(1.0, 0.0, series(200)), ConfigError);
  EXPECT_THROW(terzaghi_pressure(9.0, 1.0, series(200)), ConfigError);
  EXPECT_THROW(terzaghi_pressure(1.0, 1.0, series(5)), ConfigError);
  EXPECT_THROW(terzaghi_time_for_consolidation(1.0, series(200)), ConfigError);
}

TEST(FiniteDifference, GradientVanishesAtReference) {
  EXPECT_LT(fd_first_piola(Mat3::Identity(), kMat).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(FiniteDifference, StressErrorIsSmallestAtModerateStep) {
  // Truncation error dominates large steps, roundoff dominates tiny ones.
  const double large = fd_check_stress(kMat, 10, 1, 1e-2);
  const double mid = fd_check_stress(kMat, 10, 1, 1e-5);
  const double tiny = fd_check_stress(kMat, 10, 1, 1e-12);
  EXPECT_LT(mid, large);
  EXPECT_LT(mid, tiny);
}

TEST(FiniteDifference, TangentErrorIsSmallestAtModerateStep) {
  const double large = fd_check_tangent(kMat, 10, 1, 1e-1);
  const double mid = fd_check_tangent(kMat, 10, 1, 1e-5);
  const double tiny = fd_check_tangent(kMat, 10, 1, 1e-12);
  EXPECT_LT(mid, large);
  EXPECT_LT(mid, tiny);
}

TEST(FiniteDifference, DetectsWrongTangent) {
  const auto wrong = [](const Kinematics& k, const NeoHookeParams& p) {
    Voigt6 d = spatial_tangent(k, p);
    d.bottomRightCorner<3, 3>() *= 2.0;
    return d;
  };
  EXPECT_GT(fd_check_tangent(kMat, 20, 1, 1e-5, wrong), 1e-2);
  const auto wrong_stress = [](const Kinematics& k, const NeoHookeParams& p) {
    return Mat3(cauchy_stress(k, p) * 1.001);
  };
  EXPECT_GT(fd_check_stress(kMat, 20, 1, 1e-6, wrong_stress), 1e-5);
}

TEST(DenseOracle, RefusesLargeMeshes) {
  const Mesh m = box(3, 3);
  const DofMap dofs(m);
  ASSERT_GT(dofs.size(), kDenseOracleMaxDofs);
  const SolutionState s = SolutionState::zero(dofs);
  EXPECT_THROW(dense_assembly_oracle(m, s, s, {kMat, {1e-3}, false}, 1.0), ConfigError);
}

TEST(DenseOracle, SingleElementMatchesElementBlocks) {
  const Mesh m = subset(box(1, 1), {0});
  const DofMap dofs(m);
  SolutionState prev = SolutionState::zero(dofs), s = prev;
  randomize(s, 3, 0.02);
  randomize(prev, 4, 0.02);
  const PhysicalModel model{kMat, {1e-3}, true};
  const double dt = 2.0;
  const Eigen::MatrixXd a = dense_assembly_oracle(m, s, prev, model, dt);

  const ElementInput in = gather_element(m, dofs, 0, s, prev);
  const double tau = tau_gls(circumsphere_radius(m.corner_coords(0)), 1e-3, dt);
  const auto em = element_matrices(in, kMat, {1e-3}, {tau, true}, dt);
  const auto ed = dofs.element_dofs(m.elements[0]);
  double worst = 0.0;
  for (int i = 0; i < 30; ++i) {
    for (int j = 0; j < 30; ++j) worst = std::max(worst, std::abs(a(ed[i], ed[j]) - em.k_uu(i, j) - em.k_uu_gls(i, j)));
    for (int j = 0; j < 4; ++j) {
      worst = std::max(worst, std::abs(a(ed[i], ed[30 + j]) - em.k_up(i, j)));
      worst = std::max(worst, std::abs(a(ed[30 + j], ed[i]) - em.k_up(i, j)));
    }
  }
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) worst = std::max(worst, std::abs(a(ed[30 + i], ed[30 + j]) + dt * em.k_pp(i, j)));
  EXPECT_LT(worst, 1e-14);
}

TEST(DenseOracle, TwoElementsAreAdditive) {
  const Mesh full = box(1, 1);
  const Mesh both = subset(full, {0, 1});
  const DofMap dofs(both);
  SolutionState s = SolutionState::zero(dofs);
  randomize(s, 5, 0.01);
  const PhysicalModel model{kMat, {1e-3}, false};
  const Eigen::MatrixXd a = dense_assembly_oracle(both, s, SolutionState::zero(dofs), model, 1.0);
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(a.rows(), a.cols());
  for (int e = 0; e < 2; ++e) {
    const auto em = element_matrices(gather_element(both, dofs, e, s, SolutionState::zero(dofs)), kMat, {1e-3}, {}, 1.0);
    const auto ed = dofs.element_dofs(both.elements[static_cast<std::size_t>(e)]);
    for (int i = 0; i < 30; ++i) {
      for (int j = 0; j < 30; ++j) sum(ed[i], ed[j]) += em.k_uu(i, j);
      for (int j = 0; j < 4; ++j) {
        sum(ed[i], ed[30 + j]) += em.k_up(i, j);
        sum(ed[30 + j], ed[i]) += em.k_up(i, j);
      }
    }
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) sum(ed[30 + i], ed[30 + j]) -= em.k_pp(i, j);
  }
  EXPECT_LT((a - sum).cwiseAbs().maxCoeff(), 1e-14);
}
