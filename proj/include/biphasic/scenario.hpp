#pragma once

#include <filesystem>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "biphasic/mesh.hpp"
#include "biphasic/solver.hpp"

namespace biphasic {

enum class ScenarioKind { unconfined_compression, terzaghi };
enum class ContactMode { frictionless, tied };

/// Everything needed to run one simulation. Units: mm, N, s, MPa.
struct SimulationConfig {
  ScenarioKind kind = ScenarioKind::unconfined_compression;
  ContactMode contact = ContactMode::frictionless;

  MeshSpec mesh{.shape = MeshShape::quarter_cylinder};
  std::filesystem::path mesh_path;  // when set, read instead of generating

  NeoHookeParams material;
  PermeabilityParams fluid;

  double dt = 6.4;                // s
  double rate = 2.5e-3;           // mm/s, platen speed
  double target_strain = 0.01;    // fraction of the height
  double end_time = 0.0;          // s, traction-driven runs only
  double traction = 0.0;          // MPa, compressive, traction-driven runs only

  bool gls_enabled = false;

  std::filesystem::path output_dir;
  int vtk_every = 0;  // 0 disables VTK output
  Line profile_line{Vec3::Zero(), Vec3::UnitZ()};
  double profile_tol = 1e-6;

  NewtonSettings newton;

  /// Throws ConfigError naming the offending key.
  void validate() const;

  /// Number of steps implied by the loading program.
  int num_steps() const;
  /// Height of the specimen along z (mm) for generated meshes.
  double height() const;

  /// Unconfined compression of the quarter cylinder with the reference
  /// parameters (lambda 0.2 MPa, mu 0.5 MPa, k 1e-3, 2.5 um/s, dt 6.4 s, 1%).
  static SimulationConfig reference_defaults();
};

/// Nested-key text format: one `section.key = value` per line, '#' comments.
SimulationConfig load_config(const std::filesystem::path& path);
SimulationConfig parse_config(const std::string& text);
void save_config(const SimulationConfig& config, const std::filesystem::path& path);
std::string format_config(const SimulationConfig& config);
/// Applies one `key=value` override (same keys and validation as the file).
void apply_override(SimulationConfig& config, const std::string& assignment);

/// Prescribed displacement component on a facet set:
/// value(t) = offset + rate * min(t, hold_after).
struct DisplacementBc {
  std::string facet_set;
  int component = 0;
  double offset = 0.0;
  double rate = 0.0;
  double hold_after = std::numeric_limits<double>::infinity();

  double at(double t) const { return offset + rate * std::min(t, hold_after); }
};

struct PressureBc {
  std::string facet_set;
  double value = 0.0;
};

/// Natural condition on the outward seepage flux w.n (mm/s).
struct FluxBc {
  std::string facet_set;
  double value = 0.0;
};

/// Dead-load traction on the reference facets, MPa.
struct TractionBc {
  std::string facet_set;
  Vec3 traction = Vec3::Zero();
};

struct BoundaryConditionSet {
  std::vector<DisplacementBc> displacement;
  std::vector<PressureBc> pressure;
  std::vector<FluxBc> flux;
  std::vector<TractionBc> traction;
};

/// A mesh with boundary conditions and a time program.
struct Scenario {
  std::shared_ptr<const Mesh> mesh;
  PhysicalModel model;
  BoundaryConditionSet bcs;
  double dt = 1.0;
  int n_steps = 0;
  Line profile_line;
  double profile_tol = 1e-6;
  NewtonSettings newton;

  /// Throws ConfigError when a referenced facet set is missing.
  void check() const;
  ConstraintSet constraints(const DofMap& dofs, double t) const;
  Eigen::VectorXd external_force(const DofMap& dofs, double t) const;
  /// Consistent nodal outflow per pressure dof (mm^3/s).
  Eigen::VectorXd external_flux(const DofMap& dofs, double t) const;
  Loading loading(const DofMap& dofs) const;
};

/// Mesh described by the config (generated or read from mesh_path).
std::shared_ptr<const Mesh> make_mesh(const SimulationConfig& config);

/// Platens on top and bottom (p = 0, top displaced at -rate t), sealed and
/// traction-free lateral surface, symmetry on sym_x / sym_y.
Scenario build_unconfined_compression(const SimulationConfig& config);
Scenario build_unconfined_compression(const SimulationConfig& config, std::shared_ptr<const Mesh> mesh);

/// Oedometer column: compressive traction on a drained top, sealed roller
/// walls and base.
Scenario build_terzaghi_column(const SimulationConfig& config);
Scenario build_terzaghi_column(const SimulationConfig& config, std::shared_ptr<const Mesh> mesh);

Scenario build_scenario(const SimulationConfig& config);

/// Runs n_steps of the scenario from the zero state.
std::vector<SolutionState> march(const Scenario& scenario, int n_steps, const TransientSolver::StepHook& hook = {});

}  // namespace biphasic
