#include "biphasic/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "biphasic/errors.hpp"
#include "biphasic/fem.hpp"
#include "biphasic/postprocess.hpp"
#include "biphasic/scenario.hpp"

namespace biphasic {

double TerzaghiComparison::max_error() const {
  return *std::max_element(rel_l2_error.begin(), rel_l2_error.end());
}

TerzaghiComparison terzaghi_comparison(int elements, const TerzaghiSetup& setup) {
  SimulationConfig c;
  c.kind = ScenarioKind::terzaghi;
  c.mesh = MeshSpec{.shape = MeshShape::box, .lx = 1.0, .ly = 1.0, .lz = setup.H, .nx = 1, .ny = 1, .nz = elements};
  c.material = setup.material;
  c.fluid.k = setup.k;
  c.traction = setup.sigma0;

  TerzaghiParams prm;
  prm.H = setup.H;
  prm.sigma0 = setup.sigma0;
  prm.M = setup.material.lambda + 2.0 * setup.material.mu;
  prm.k = setup.k;

  TerzaghiComparison out;
  out.elements = elements;
  const auto mesh = make_mesh(c);
  for (std::size_t i = 0; i < 3; ++i) {
    const double t = terzaghi_time_for_consolidation(out.degree[i], prm);
    out.time[i] = t;
    c.dt = t / setup.steps;
    c.end_time = t;
    const Scenario sc = build_terzaghi_column(c, mesh);
    const auto states = march(sc, setup.steps);
    const DofMap dofs(*mesh);
    const auto nodes = pressure_nodes(dofs, reference_line_nodes(*mesh, sc.profile_line, 1e-9));
    const auto prof = extract_profile(*mesh, dofs, states.back(), nodes, sc.profile_line);
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < prof.size(); ++j) {
      const double exact = terzaghi_pressure(prof.z[j], states.back().t, prm);
      num += (prof.p[j] - exact) * (prof.p[j] - exact);
      den += exact * exact;
    }
    out.rel_l2_error[i] = std::sqrt(num / den);
  }
  return out;
}

namespace {

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

CheckResult quadrature_check() {
  const auto& rule = quadrature_tet4pt();
  double worst = 0.0;
  for (int a = 0; a <= 2; ++a)
    for (int b = 0; a + b <= 2; ++b)
      for (int c = 0; a + b + c <= 2; ++c) {
        double sum = 0.0;
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
          const Vec3& x = rule.points[q];
          sum += rule.weights[q] * std::pow(x.x(), a) * std::pow(x.y(), b) * std::pow(x.z(), c);
        }
        const double exact = factorial(a) * factorial(b) * factorial(c) / factorial(a + b + c + 3);
        worst = std::max(worst, std::abs(sum - exact));
      }
  return {"quadrature degree-2 exactness", worst <= 1e-14, worst, 1e-14, "max abs error over monomials"};
}

CheckResult assembly_check() {
  const Mesh mesh = generate_box({.shape = MeshShape::box});
  const DofMap dofs(mesh);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> du(-0.02, 0.02), dp(-0.05, 0.05);
  SolutionState prev = SolutionState::zero(dofs), state = prev;
  for (int i = 0; i < state.u.size(); ++i) {
    prev.u(i) = du(rng);
    state.u(i) = prev.u(i) + du(rng);
  }
  for (int i = 0; i < state.p.size(); ++i) state.p(i) = dp(rng);
  double worst = 0.0;
  for (bool gls : {false, true}) {
    const PhysicalModel model{{0.2, 0.5}, {1e-3}, gls};
    const GlobalSystem sys = assemble(mesh, state, prev, model, 6.4);
    Eigen::VectorXd rhs;
    const Eigen::MatrixXd dense = dense_assembly_oracle(mesh, state, prev, model, 6.4, &rhs);
    worst = std::max(worst, (Eigen::MatrixXd(sys.matrix) - dense).cwiseAbs().maxCoeff());
    worst = std::max(worst, (sys.rhs - rhs).cwiseAbs().maxCoeff());
  }
  return {"sparse vs dense assembly", worst <= 1e-14, worst, 1e-14, "max abs difference, GLS off and on"};
}

CheckResult symmetry_check() {
  double worst = 0.0;
  int systems = 0;
  for (bool gls : {false, true}) {
    SimulationConfig c = SimulationConfig::reference_defaults();
    c.mesh.nc = 2;
    c.mesh.nr = 1;
    c.mesh.nz = 2;
    c.gls_enabled = gls;
    const Scenario sc = build_unconfined_compression(c);
    const DofMap dofs(*sc.mesh);
    TransientSolver solver(*sc.mesh, sc.model, sc.loading(dofs), sc.newton);
    solver.on_assembled = [&](const GlobalSystem& sys) {
      worst = std::max(worst, symmetry_defect(sys.matrix));
      ++systems;
    };
    solver.march(SolutionState::zero(solver.dofs()), sc.dt, 3);
  }
  return {"block matrix symmetry", worst < 1e-12, worst, 1e-12,
          std::to_string(systems) + " Newton systems, GLS off and on"};
}

}  // namespace

std::vector<CheckResult> run_verification(const VerifyOptions& options) {
  if (options.terzaghi_refine < 1 || options.terzaghi_refine > 5)
    throw ConfigError("terzaghi refinement levels must be between 1 and 5");
  std::vector<CheckResult> checks;
  const NeoHookeParams mat{0.2, 0.5};

  const double es = fd_check_stress(mat, 20);
  checks.push_back({"FD stress (20 states)", es < 1e-5, es, 1e-5, "max relative error"});
  const double et = fd_check_tangent(mat, 20, 1, 1e-5, options.tangent);
  checks.push_back({"FD tangent (20 states)", et < 1e-4, et, 1e-4, "max relative error"});

  const auto kin = Kinematics::from_deformation_gradient(Mat3::Identity());
  const double s0 = cauchy_stress(kin, mat).cwiseAbs().maxCoeff();
  const double w0 = std::abs(strain_energy(kin, mat));
  checks.push_back({"stress-free reference", s0 == 0.0 && w0 == 0.0, std::max(s0, w0), 0.0, "sigma(I) and Phi(I)"});

  checks.push_back(quadrature_check());
  checks.push_back(assembly_check());
  checks.push_back(symmetry_check());

  std::vector<TerzaghiComparison> study;
  for (int level = 1; level <= options.terzaghi_refine; ++level) {
    const int elements = 16 >> (options.terzaghi_refine - level);
    study.push_back(terzaghi_comparison(std::max(elements, 1)));
  }
  const auto& finest = study.back();
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%d elements, errors at U=20/50/80%%: %.3g %.3g %.3g", finest.elements,
                finest.rel_l2_error[0], finest.rel_l2_error[1], finest.rel_l2_error[2]);
  checks.push_back({"Terzaghi relative L2 error", finest.max_error() < 0.02, finest.max_error(), 0.02, buf});
  if (study.size() > 1) {
    bool monotone = true;
    std::string detail = "max error by level:";
    for (std::size_t i = 0; i < study.size(); ++i) {
      std::snprintf(buf, sizeof(buf), " %d:%.3g", study[i].elements, study[i].max_error());
      detail += buf;
      if (i > 0 && !(study[i].max_error() < study[i - 1].max_error())) monotone = false;
    }
    checks.push_back({"Terzaghi refinement monotone", monotone, finest.max_error(), 0.0, detail});
  }
  return checks;
}

void print_checks(const std::vector<CheckResult>& checks, std::ostream& out) {
  char buf[256];
  for (const auto& c : checks) {
    std::snprintf(buf, sizeof(buf), "%-4s %-32s value=%-12.4g limit=%-10.3g %s", c.passed ? "PASS" : "FAIL",
                  c.name.c_str(), c.value, c.threshold, c.detail.c_str());
    out << buf << '\n';
  }
}

}  // namespace biphasic
