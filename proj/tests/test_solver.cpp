#include <gtest/gtest.h>

#include <random>

#include "biphasic/errors.hpp"
#include "biphasic/oracle.hpp"
#include "biphasic/solver.hpp"

using namespace biphasic;

namespace {

Mesh unit_box(int nz = 1) {
  MeshSpec s;
  s.shape = MeshShape::box;
  s.nz = nz;
  s.lz = nz;
  return generate_box(s);
}

// Random symmetric quasi-definite matrix [[A, B], [B^T, -C]].
SparseMatrix quasi_definite(int nu, int np, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  Eigen::MatrixXd a = Eigen::MatrixXd::NullaryExpr(nu, nu, [&] { return d(rng); });
  a = a * a.transpose() + nu * Eigen::MatrixXd::Identity(nu, nu);
  Eigen::MatrixXd c = Eigen::MatrixXd::NullaryExpr(np, np, [&] { return d(rng); });
  c = c * c.transpose() + Eigen::MatrixXd::Identity(np, np);
  const Eigen::MatrixXd b = Eigen::MatrixXd::NullaryExpr(nu, np, [&] { return d(rng); });
  Eigen::MatrixXd m(nu + np, nu + np);
  m << a, b, b.transpose(), -c;
  return m.sparseView();
}

// Column with drained top, rollers elsewhere; the top plane is pushed down
// by `depth` * t.
Loading pushed_column(const Mesh& mesh, const DofMap& dofs, double depth) {
  Loading l;
  l.constraints = [&mesh, &dofs, depth](double t) {
    ConstraintSet c;
    for (int n : mesh.facet_set_nodes("x0")) c.add(dofs.u_dof(n, 0), 0.0);
    for (int n : mesh.facet_set_nodes("x1")) c.add(dofs.u_dof(n, 0), 0.0);
    for (int n : mesh.facet_set_nodes("y0")) c.add(dofs.u_dof(n, 1), 0.0);
    for (int n : mesh.facet_set_nodes("y1")) c.add(dofs.u_dof(n, 1), 0.0);
    for (int n : mesh.facet_set_nodes("bottom")) c.add(dofs.u_dof(n, 2), 0.0);
    for (int n : mesh.facet_set_nodes("top")) c.add(dofs.u_dof(n, 2), -depth * t);
    for (int n : mesh.facet_set_corner_nodes("top")) c.add(dofs.p_dof(n), 0.0);
    return c;
  };
  return l;
}

}  // namespace

TEST(DofMap, LayoutPutsPressureAfterDisplacement) {
  const Mesh m = unit_box();
  const DofMap dofs(m);
  EXPECT_EQ(dofs.num_u(), 3 * 27);
  EXPECT_EQ(dofs.num_p(), 8);
  EXPECT_EQ(dofs.size(), 81 + 8);
  int last = -1;
  for (int n = 0; n < m.num_nodes(); ++n) {
    EXPECT_EQ(dofs.has_pressure(n), static_cast<bool>(m.corner_mask()[static_cast<std::size_t>(n)]));
    if (!dofs.has_pressure(n)) {
      EXPECT_THROW(dofs.pressure_index(n), QueryError);
      continue;
    }
    EXPECT_GT(dofs.p_dof(n), last);
    last = dofs.p_dof(n);
  }
  EXPECT_EQ(last, dofs.size() - 1);
}

TEST(DofMap, ElementDofsMatchNodes) {
  const Mesh m = unit_box();
  const DofMap dofs(m);
  const auto& el = m.elements[3];
  const auto ed = dofs.element_dofs(el);
  for (int a = 0; a < 10; ++a)
    for (int i = 0; i < 3; ++i) EXPECT_EQ(ed[static_cast<std::size_t>(3 * a + i)], dofs.u_dof(el.nodes[a], i));
  for (int a = 0; a < 4; ++a) EXPECT_EQ(ed[static_cast<std::size_t>(30 + a)], dofs.p_dof(el.nodes[a]));
}

TEST(Constraints, ConflictingValuesThrow) {
  ConstraintSet c;
  c.add(3, 1.0);
  EXPECT_NO_THROW(c.add(3, 1.0));
  EXPECT_THROW(c.add(3, 2.0), ConfigError);
  EXPECT_EQ(c.size(), 1u);
  const auto h = c.homogeneous();
  EXPECT_TRUE(h.contains(3));
  EXPECT_EQ(h.begin()->second, 0.0);
}

TEST(Dirichlet, MatchesDenseReducedSolve) {
  const int nu = 12, np = 5, n = nu + np;
  SparseMatrix a = quasi_definite(nu, np, 4);
  const Eigen::MatrixXd dense = a;
  std::mt19937 rng(8);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  Eigen::VectorXd b = Eigen::VectorXd::NullaryExpr(n, [&] { return d(rng); });
  ConstraintSet c;
  c.add(0, 0.3);
  c.add(7, -0.1);
  c.add(nu + 2, 0.05);

  std::vector<int> free;
  for (int i = 0; i < n; ++i)
    if (!c.contains(i)) free.push_back(i);
  Eigen::VectorXd xc = Eigen::VectorXd::Zero(n);
  for (const auto& [dof, v] : c) xc(dof) = v;
  const auto nf = static_cast<Eigen::Index>(free.size());
  Eigen::MatrixXd aff(nf, nf);
  Eigen::VectorXd bf(nf);
  const Eigen::VectorXd shift = dense * xc;
  for (Eigen::Index i = 0; i < nf; ++i) {
    bf(i) = b(free[i]) - shift(free[i]);
    for (Eigen::Index j = 0; j < nf; ++j) aff(i, j) = dense(free[i], free[j]);
  }
  const Eigen::VectorXd yf = aff.lu().solve(bf);
  Eigen::VectorXd expected = xc;
  for (Eigen::Index i = 0; i < nf; ++i) expected(free[i]) = yf(i);

  Eigen::VectorXd rhs = b;
  apply_dirichlet(a, rhs, c);
  EXPECT_LT(symmetry_defect(a), 1e-15);
  LinearSolver solver;
  const Eigen::VectorXd x = solver.solve(a, rhs);
  EXPECT_LT((x - expected).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Dirichlet, OutOfRangeDofThrows) {
  SparseMatrix a = quasi_definite(3, 1, 1);
  Eigen::VectorXd rhs = Eigen::VectorXd::Ones(4);
  ConstraintSet c;
  c.add(9, 0.0);
  EXPECT_THROW(apply_dirichlet(a, rhs, c), ConfigError);
}

TEST(LinearSolver, ReusesAnalysisAcrossValues) {
  LinearSolver solver;
  for (unsigned seed : {1u, 2u, 3u}) {
    const SparseMatrix a = quasi_definite(20, 6, seed);
    const Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(26, -1.0, 1.0);
    const Eigen::VectorXd x = solver.solve(a, b);
    EXPECT_LT((a * x - b).norm(), 1e-12 * b.norm());
  }
}

TEST(LinearSolver, SingularSystemThrows) {
  SparseMatrix a(3, 3);
  a.insert(0, 0) = 1.0;
  a.insert(1, 1) = 1.0;
  a.makeCompressed();
  LinearSolver solver;
  EXPECT_THROW(solver.solve(a, Eigen::Vector3d(1, 1, 1)), NonConvergenceError);
  EXPECT_THROW(solver.solve(a, Eigen::Vector2d(1, 1)), ConfigError);
}

TEST(Assembly, MatchesDenseOracle) {
  const Mesh m = unit_box();
  const DofMap dofs(m);
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> du(-0.03, 0.03);
  SolutionState prev = SolutionState::zero(dofs), state = prev;
  for (int i = 0; i < state.u.size(); ++i) {
    prev.u(i) = du(rng);
    state.u(i) = prev.u(i) + du(rng);
  }
  for (int i = 0; i < state.p.size(); ++i) state.p(i) = du(rng);
  for (bool gls : {false, true}) {
    const PhysicalModel model{{0.2, 0.5}, {5e-3}, gls};
    const GlobalSystem sys = assemble(m, state, prev, model, 3.2);
    Eigen::VectorXd rhs;
    const Eigen::MatrixXd dense = dense_assembly_oracle(m, state, prev, model, 3.2, &rhs);
    EXPECT_LE((Eigen::MatrixXd(sys.matrix) - dense).cwiseAbs().maxCoeff(), 1e-14) << "gls " << gls;
    EXPECT_LE((sys.rhs - rhs).cwiseAbs().maxCoeff(), 1e-14) << "gls " << gls;
    EXPECT_LT(symmetry_defect(sys.matrix), 1e-12);
  }
}

TEST(Assembly, ReusableAssemblerIsBitwiseReproducible) {
  const Mesh m = unit_box(2);
  const DofMap dofs(m);
  const Assembler assembler(m, dofs);
  SolutionState s = SolutionState::zero(dofs);
  s.u.setConstant(0.01);
  s.p.setConstant(0.002);
  const PhysicalModel model{{0.2, 0.5}, {1e-3}, true};
  const auto a = assembler.assemble(s, SolutionState::zero(dofs), model, 6.4);
  const auto b = assembler.assemble(s, SolutionState::zero(dofs), model, 6.4);
  EXPECT_EQ((Eigen::MatrixXd(a.matrix) - Eigen::MatrixXd(b.matrix)).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ((a.rhs - b.rhs).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_GT(a.stats.tau_min, 0.0);
  EXPECT_LE(a.stats.tau_min, a.stats.tau_max);
}

TEST(Assembly, ElementTauFollowsCircumsphere) {
  const Mesh m = unit_box();
  const auto tau = element_tau(m, 1e-3, 6.4);
  ASSERT_EQ(static_cast<int>(tau.size()), m.num_elements());
  for (int e = 0; e < m.num_elements(); ++e) {
    const double h = circumsphere_radius(m.corner_coords(e));
    EXPECT_DOUBLE_EQ(tau[static_cast<std::size_t>(e)], h * h / (4.0 * 1e-3 * 6.4));
  }
}

TEST(Newton, UnloadedProblemStaysAtZero) {
  const Mesh m = unit_box(2);
  const DofMap dofs(m);
  TransientSolver solver(m, {{0.2, 0.5}, {1e-3}, false}, pushed_column(m, dofs, 0.0));
  const auto r = solver.solve_time_step(SolutionState::zero(solver.dofs()), 1.0);
  EXPECT_EQ(r.state.u.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(r.state.p.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_DOUBLE_EQ(r.state.t, 1.0);
}

TEST(Newton, ConvergesAndMeetsConstraints) {
  const Mesh m = unit_box(2);
  const DofMap dofs(m);
  for (bool gls : {false, true}) {
    TransientSolver solver(m, {{0.2, 0.5}, {1e-3}, gls}, pushed_column(m, dofs, 0.01));
    int checked = 0;
    solver.on_assembled = [&](const GlobalSystem& sys) {
      EXPECT_LT(symmetry_defect(sys.matrix), 1e-12);
      ++checked;
    };
    // The GLS block is linearized without its configuration dependence, so
    // convergence is linear when tau is large.
    const int budget = gls ? 25 : 5;
    const auto states = solver.march(SolutionState::zero(solver.dofs()), 1.0, 3, [&](int, const StepResult& r) {
      EXPECT_LE(r.iterations, budget);
      EXPECT_LT(r.residuals.back(), r.residuals.front());
    });
    ASSERT_EQ(states.size(), 4u);
    EXPECT_GT(checked, 0);
    for (int n : m.facet_set_nodes("top")) EXPECT_NEAR(states.back().displacement(dofs, n, 2), -0.03, 1e-15);
    // Undrained loading of the sealed base pressurizes it.
    for (int n : m.facet_set_corner_nodes("bottom")) EXPECT_GT(states.back().pressure(dofs, n), 0.0);
  }
}

TEST(Newton, ImpossibleStepFailsAfterHalvings) {
  const Mesh m = unit_box();
  const DofMap dofs(m);
  NewtonSettings settings;
  settings.max_step_halvings = 2;
  settings.max_iters = 10;
  TransientSolver solver(m, {{0.2, 0.5}, {1e-3}, false}, pushed_column(m, dofs, 1.5), settings);
  try {
    solver.solve_time_step(SolutionState::zero(solver.dofs()), 1.0);
    FAIL() << "expected StepFailure";
  } catch (const StepFailure& e) {
    EXPECT_GE(e.attempts().size(), 3u);
    EXPECT_GT(e.time(), 0.0);
    EXPECT_LE(e.time(), 1.0);
  }
}

TEST(Newton, HalvingRescuesLargeStep) {
  const Mesh m = unit_box();
  const DofMap dofs(m);
  NewtonSettings settings;
  settings.max_iters = 8;
  TransientSolver solver(m, {{0.2, 0.5}, {1e-3}, false}, pushed_column(m, dofs, 0.2), settings);
  const auto r = solver.solve_time_step(SolutionState::zero(solver.dofs()), 1.0);
  EXPECT_GT(r.substeps, 1);
  EXPECT_DOUBLE_EQ(r.state.t, 1.0);
  for (int n : m.facet_set_nodes("top")) EXPECT_NEAR(r.state.displacement(dofs, n, 2), -0.2, 1e-14);
}

TEST(Newton, SettingsValidate) {
  NewtonSettings s;
  s.max_iters = 0;
  EXPECT_THROW(s.validate(), ConfigError);
  s = {};
  s.rel_tol = -1.0;
  EXPECT_THROW(s.validate(), ConfigError);
  s = {};
  EXPECT_NO_THROW(s.validate());
}
