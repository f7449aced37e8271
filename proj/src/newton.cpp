#include <cmath>
#include <sstream>

#include "biphasic/errors.hpp"
#include "biphasic/solver.hpp"

namespace biphasic {

void NewtonSettings::validate() const {
  if (!(rel_tol > 0) || !(abs_tol > 0)) throw ConfigError("Newton tolerances must be positive");
  if (max_iters < 1) throw ConfigError("Newton max_iters must be >= 1");
  if (max_step_halvings < 0) throw ConfigError("max_step_halvings must be >= 0");
}

TransientSolver::TransientSolver(const Mesh& mesh, PhysicalModel model, Loading loading, NewtonSettings settings)
    : mesh_(mesh),
      dofs_(mesh),
      model_(model),
      loading_(std::move(loading)),
      settings_(settings),
      assembler_(mesh_, dofs_) {
  settings_.validate();
  model_.material.validate();
  model_.permeability.validate();
}

StepResult TransientSolver::newton(const SolutionState& prev, double t_new, double dt) {
  if (!(dt > 0)) throw ConfigError("time increment must be positive");
  StepResult result;
  SolutionState& state = result.state;
  state = prev;
  state.t = t_new;

  const ConstraintSet constraints = loading_.constraints ? loading_.constraints(t_new) : ConstraintSet{};
  const int nu = dofs_.num_u();
  for (const auto& [dof, value] : constraints) {
    if (dof < nu)
      state.u(dof) = value;
    else
      state.p(dof - nu) = value;
  }
  const ConstraintSet increments = constraints.homogeneous();
  Eigen::VectorXd f_ext;
  if (loading_.external_force) f_ext = loading_.external_force(t_new);
  Eigen::VectorXd q_ext;
  if (loading_.external_flux) q_ext = loading_.external_flux(t_new);

  std::vector<double>& history = result.residuals;
  double r0 = 0.0;
  for (int it = 0;; ++it) {
    GlobalSystem sys;
    try {
      sys = assembler_.assemble(state, prev, model_, dt);
    } catch (const InvertedElementError& e) {
      throw NonConvergenceError(std::string("inverted element during Newton iteration: ") + e.what(), history);
    }
    if (f_ext.size() == nu) sys.rhs.head(nu) += f_ext;
    if (q_ext.size() == dofs_.num_p()) sys.rhs.tail(dofs_.num_p()) -= dt * q_ext;
    if (on_assembled) on_assembled(sys);
    apply_dirichlet(sys, increments);

    const double r = sys.rhs.norm();
    if (!std::isfinite(r)) throw NonConvergenceError("non-finite residual", history);
    history.push_back(r);
    if (it == 0) r0 = r;
    if (r <= settings_.rel_tol * r0 + settings_.abs_tol) {
      result.iterations = it;
      result.residual_u_norm = sys.rhs.head(nu).norm();
      result.residual_p_norm = sys.rhs.tail(dofs_.num_p()).norm();
      result.stats = sys.stats;
      return result;
    }
    if (it == settings_.max_iters) {
      std::ostringstream msg;
      msg << "Newton did not converge in " << settings_.max_iters << " iterations at t = " << t_new
          << " (residual " << r << ", initial " << r0 << ")";
      throw NonConvergenceError(msg.str(), history);
    }
    const Eigen::VectorXd delta = linear_.solve(sys.matrix, sys.rhs);
    state.u += delta.head(nu);
    state.p += delta.tail(dofs_.num_p());
  }
}

StepResult TransientSolver::solve_interval(const SolutionState& prev, double t_target, double dt, int halvings_left,
                                           std::vector<std::vector<double>>& attempts) {
  std::string reason;
  try {
    return newton(prev, t_target, dt);
  } catch (const NonConvergenceError& e) {
    attempts.push_back(e.residual_history());
    reason = e.what();
  }
  if (halvings_left == 0) {
    std::ostringstream msg;
    msg << "time step to t = " << t_target << " failed after " << settings_.max_step_halvings
        << " step halving(s): " << reason;
    throw StepFailure(msg.str(), t_target, attempts);
  }
  const double half = 0.5 * dt;
  StepResult first = solve_interval(prev, t_target - half, half, halvings_left - 1, attempts);
  StepResult second = solve_interval(first.state, t_target, half, halvings_left - 1, attempts);
  second.iterations += first.iterations;
  second.substeps += first.substeps;
  return second;
}

StepResult TransientSolver::solve_time_step(const SolutionState& prev, double dt) {
  std::vector<std::vector<double>> attempts;
  return solve_interval(prev, prev.t + dt, dt, settings_.max_step_halvings, attempts);
}

std::vector<SolutionState> TransientSolver::march(const SolutionState& initial, double dt, int n_steps,
                                                  const StepHook& hook) {
  if (!(dt > 0)) throw ConfigError("time increment must be positive");
  std::vector<SolutionState> states{initial};
  states.reserve(static_cast<std::size_t>(n_steps) + 1);
  for (int i = 1; i <= n_steps; ++i) {
    const double t = initial.t + i * dt;
    std::vector<std::vector<double>> attempts;
    StepResult r = solve_interval(states.back(), t, t - states.back().t, settings_.max_step_halvings, attempts);
    if (hook) hook(i, r);
    states.push_back(std::move(r.state));
  }
  return states;
}

}  // namespace biphasic
