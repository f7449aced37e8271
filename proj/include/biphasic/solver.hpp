#pragma once

#include <array>
#include <functional>
#include <map>
#include <memory>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "biphasic/fem.hpp"
#include "biphasic/material.hpp"
#include "biphasic/mesh.hpp"

namespace biphasic {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Global numbering. Displacement dofs come first (3 per node, node-major),
/// then one pressure dof per corner node, numbered by increasing node id.
class DofMap {
 public:
  DofMap() = default;
  explicit DofMap(const Mesh& mesh);

  int num_nodes() const { return static_cast<int>(pressure_index_.size()); }
  int num_u() const { return 3 * num_nodes(); }
  int num_p() const { return num_p_; }
  int size() const { return num_u() + num_p_; }

  int u_dof(int node, int component) const { return 3 * node + component; }
  bool has_pressure(int node) const { return pressure_index_[static_cast<std::size_t>(node)] >= 0; }
  /// Index into the pressure vector; throws QueryError for midside nodes.
  int pressure_index(int node) const;
  int p_dof(int node) const { return num_u() + pressure_index(node); }

  /// 30 displacement dofs (node-major) followed by 4 pressure dofs.
  std::array<int, 34> element_dofs(const Tet10& el) const;

 private:
  std::vector<int> pressure_index_;
  int num_p_ = 0;
};

struct SolutionState {
  Eigen::VectorXd u;  // mm, 3 per node
  Eigen::VectorXd p;  // MPa, per corner node
  double t = 0.0;     // s

  static SolutionState zero(const DofMap& dofs);
  double displacement(const DofMap& dofs, int node, int comp) const { return u(dofs.u_dof(node, comp)); }
  double pressure(const DofMap& dofs, int node) const { return p(dofs.pressure_index(node)); }
};

/// Prescribed values keyed by global dof.
class ConstraintSet {
 public:
  /// Throws ConfigError when the dof already carries a different value.
  void add(int dof, double value);
  bool contains(int dof) const { return values_.count(dof) != 0; }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  auto begin() const { return values_.begin(); }
  auto end() const { return values_.end(); }
  /// Same dofs, every value zero (Newton increments).
  ConstraintSet homogeneous() const;

 private:
  std::map<int, double> values_;
};

struct PhysicalModel {
  NeoHookeParams material;
  PermeabilityParams permeability;
  bool gls_enabled = false;
};

struct AssemblyStats {
  double min_J = 0.0;
  double max_J = 0.0;
  double tau_min = 0.0;
  double tau_max = 0.0;
};

/// Block system [[K_uu + K_gls, K_up], [K_up^T, -dt K_pp]] in the DofMap
/// layout, with rhs = external - internal forces (mass rows scaled by -dt).
struct GlobalSystem {
  SparseMatrix matrix;
  Eigen::VectorXd rhs;
  AssemblyStats stats;
};

/// Reusable assembler: caches the sparsity pattern, element dof lists and
/// element sizes. Elements are processed in index order, so results are
/// bitwise reproducible.
class Assembler {
 public:
  Assembler(const Mesh& mesh, const DofMap& dofs);

  GlobalSystem assemble(const SolutionState& state, const SolutionState& prev, const PhysicalModel& model,
                        double dt) const;

  const std::vector<double>& element_sizes() const { return h_; }

 private:
  const Mesh& mesh_;
  const DofMap& dofs_;
  std::vector<std::array<int, 34>> element_dofs_;
  std::vector<double> h_;
  SparseMatrix pattern_;
};

/// One-shot assembly (builds the pattern each call).
GlobalSystem assemble(const Mesh& mesh, const SolutionState& state, const SolutionState& prev,
                      const PhysicalModel& model, double dt);

/// Gathers the element input (reference geometry, current and previous
/// displacement, pressure) from global state.
ElementInput gather_element(const Mesh& mesh, const DofMap& dofs, int element, const SolutionState& state,
                            const SolutionState& prev);

/// GLS factor of every element for the given permeability and time step,
/// using the reference-configuration circumsphere radius as h.
std::vector<double> element_tau(const Mesh& mesh, double k, double dt);

/// Symmetric elimination: constrained rows and columns are zeroed, the
/// diagonal set to 1, the rhs entry set to the prescribed value and the
/// column contribution moved to the free rows.
void apply_dirichlet(GlobalSystem& system, const ConstraintSet& constraints);
void apply_dirichlet(SparseMatrix& matrix, Eigen::VectorXd& rhs, const ConstraintSet& constraints);

/// Sparse direct solver for the symmetric indefinite block system. The
/// symbolic analysis is reused while the sparsity pattern is unchanged.
class LinearSolver {
 public:
  LinearSolver();
  ~LinearSolver();
  LinearSolver(LinearSolver&&) noexcept;
  LinearSolver& operator=(LinearSolver&&) noexcept;

  /// Throws NonConvergenceError when the factorization fails.
  Eigen::VectorXd solve(const SparseMatrix& matrix, const Eigen::VectorXd& rhs);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct NewtonSettings {
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  int max_iters = 25;
  int max_step_halvings = 4;

  void validate() const;
};

/// Time-dependent boundary data supplied by a scenario.
struct Loading {
  std::function<ConstraintSet(double t)> constraints;
  /// Consistent nodal forces on displacement dofs; may be empty (no load).
  std::function<Eigen::VectorXd(double t)> external_force;
  /// Prescribed outflow integrated against the pressure shape functions
  /// (one entry per pressure dof); may be empty (sealed).
  std::function<Eigen::VectorXd(double t)> external_flux;
};

struct StepResult {
  SolutionState state;
  int iterations = 0;  // linear solves, summed over substeps
  int substeps = 1;
  std::vector<double> residuals;  // history of the last substep
  double residual_u_norm = 0.0;   // momentum residual at convergence
  double residual_p_norm = 0.0;   // dt-scaled mass residual at convergence
  AssemblyStats stats;
};

/// Newton-Raphson with backward-Euler time integration of the coupled system.
class TransientSolver {
 public:
  TransientSolver(const Mesh& mesh, PhysicalModel model, Loading loading, NewtonSettings settings = {});
  TransientSolver(const TransientSolver&) = delete;
  TransientSolver& operator=(const TransientSolver&) = delete;

  const DofMap& dofs() const { return dofs_; }
  const Mesh& mesh() const { return mesh_; }
  const PhysicalModel& model() const { return model_; }
  const Assembler& assembler() const { return assembler_; }

  /// Advances from prev to prev.t + dt. On failure the increment is halved
  /// (up to max_step_halvings times, recursively); throws StepFailure after that.
  StepResult solve_time_step(const SolutionState& prev, double dt);

  /// Single Newton solve to t_new without halving. Throws NonConvergenceError.
  StepResult newton(const SolutionState& prev, double t_new, double dt);

  using StepHook = std::function<void(int step, const StepResult&)>;
  /// States at t0 + i dt for i = 0..n_steps. The hook runs after each step.
  std::vector<SolutionState> march(const SolutionState& initial, double dt, int n_steps, const StepHook& hook = {});

  /// Called with the system of every Newton iteration before constraints are
  /// applied (used to check symmetry).
  std::function<void(const GlobalSystem&)> on_assembled;

 private:
  StepResult solve_interval(const SolutionState& prev, double t_target, double dt, int halvings_left,
                            std::vector<std::vector<double>>& attempts);

  const Mesh& mesh_;
  DofMap dofs_;
  PhysicalModel model_;
  Loading loading_;
  NewtonSettings settings_;
  Assembler assembler_;
  LinearSolver linear_;
};

/// max |A - A^T| / max |A|.
double symmetry_defect(const SparseMatrix& a);

}  // namespace biphasic
