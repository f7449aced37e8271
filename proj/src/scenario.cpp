#include "biphasic/scenario.hpp"

#include <cmath>

#include "biphasic/errors.hpp"
#include "biphasic/fem.hpp"

namespace biphasic {

// --- SimulationConfig --------------------------------------------------------

SimulationConfig SimulationConfig::reference_defaults() {
  SimulationConfig c;
  c.mesh.shape = MeshShape::quarter_cylinder;
  c.mesh.radius = 18.0;
  c.mesh.height = 8.0;
  c.mesh.nc = 5;
  c.mesh.nr = 5;
  c.mesh.nz = 5;
  c.material = {0.2, 0.5};
  c.fluid.k = 1e-3;
  c.dt = 6.4;
  c.rate = 2.5e-3;
  c.target_strain = 0.01;
  return c;
}

double SimulationConfig::height() const {
  return mesh.shape == MeshShape::box ? mesh.lz : mesh.height;
}

void SimulationConfig::validate() const {
  if (mesh_path.empty()) mesh.validate();
  material.validate();
  fluid.validate();
  newton.validate();
  if (!(dt > 0) || !std::isfinite(dt)) throw ConfigError("time.dt_s must be positive");
  if (vtk_every < 0) throw ConfigError("output.vtk_every must be >= 0");
  if (!(profile_line.direction.norm() > 0)) throw ConfigError("output.profile_line direction must be non-zero");
  if (!(profile_tol >= 0)) throw ConfigError("output.profile_tol_mm must be >= 0");
  if (kind == ScenarioKind::unconfined_compression) {
    if (!(rate > 0) || !std::isfinite(rate)) throw ConfigError("time.rate_mm_per_s must be positive");
    if (!(target_strain > 0 && target_strain < 1)) throw ConfigError("time.target_strain must lie in (0, 1)");
  } else {
    if (!(end_time > 0)) throw ConfigError("time.end_s must be positive for a traction-driven run");
    if (!(traction >= 0)) throw ConfigError("load.traction_mpa must be >= 0");
  }
}

int SimulationConfig::num_steps() const {
  const double end = kind == ScenarioKind::unconfined_compression ? target_strain * height() / rate : end_time;
  return std::max(1, static_cast<int>(std::ceil(end / dt - 1e-9)));
}

// --- Scenario ----------------------------------------------------------------

void Scenario::check() const {
  if (!mesh) throw ConfigError("scenario has no mesh");
  auto need = [&](const std::string& name) {
    if (!mesh->facet_sets.count(name)) throw ConfigError("scenario references missing facet set '" + name + "'");
  };
  for (const auto& bc : bcs.displacement) need(bc.facet_set);
  for (const auto& bc : bcs.pressure) need(bc.facet_set);
  for (const auto& bc : bcs.flux) need(bc.facet_set);
  for (const auto& bc : bcs.traction) need(bc.facet_set);
}

ConstraintSet Scenario::constraints(const DofMap& dofs, double t) const {
  ConstraintSet cs;
  for (const auto& bc : bcs.displacement) {
    const double v = bc.at(t);
    for (int n : mesh->facet_set_nodes(bc.facet_set)) cs.add(dofs.u_dof(n, bc.component), v);
  }
  for (const auto& bc : bcs.pressure)
    for (int n : mesh->facet_set_corner_nodes(bc.facet_set)) cs.add(dofs.p_dof(n), bc.value);
  return cs;
}

Eigen::VectorXd Scenario::external_force(const DofMap& dofs, double /*t*/) const {
  Eigen::VectorXd f = Eigen::VectorXd::Zero(dofs.num_u());
  for (const auto& bc : bcs.traction) {
    for (const auto& facet : mesh->facet_sets.at(bc.facet_set)) {
      std::array<Vec3, 6> x;
      for (std::size_t a = 0; a < 6; ++a) x[a] = mesh->coords(facet[a]);
      const auto fe = facet_traction_load(x, bc.traction);
      for (std::size_t a = 0; a < 6; ++a) f.segment<3>(dofs.u_dof(facet[a], 0)) += fe.segment<3>(3 * static_cast<int>(a));
    }
  }
  return f;
}

Eigen::VectorXd Scenario::external_flux(const DofMap& dofs, double /*t*/) const {
  Eigen::VectorXd q = Eigen::VectorXd::Zero(dofs.num_p());
  for (const auto& bc : bcs.flux) {
    if (bc.value == 0.0) continue;
    for (const auto& facet : mesh->facet_sets.at(bc.facet_set)) {
      const Vec3& a = mesh->coords(facet[0]);
      const double area = 0.5 * (mesh->coords(facet[1]) - a).cross(mesh->coords(facet[2]) - a).norm();
      for (std::size_t i = 0; i < 3; ++i) q(dofs.pressure_index(facet[i])) += bc.value * area / 3.0;
    }
  }
  return q;
}

Loading Scenario::loading(const DofMap& dofs) const {
  Loading l;
  l.constraints = [this, &dofs](double t) { return constraints(dofs, t); };
  if (!bcs.traction.empty()) l.external_force = [this, &dofs](double t) { return external_force(dofs, t); };
  bool has_flux = false;
  for (const auto& bc : bcs.flux) has_flux = has_flux || bc.value != 0.0;
  if (has_flux) l.external_flux = [this, &dofs](double t) { return external_flux(dofs, t); };
  return l;
}

std::shared_ptr<const Mesh> make_mesh(const SimulationConfig& config) {
  if (!config.mesh_path.empty()) return std::make_shared<const Mesh>(read_mesh(config.mesh_path));
  return std::make_shared<const Mesh>(generate_mesh(config.mesh));
}

namespace {

Scenario base_scenario(const SimulationConfig& config, std::shared_ptr<const Mesh> mesh) {
  config.validate();
  Scenario s;
  s.mesh = std::move(mesh);
  s.model = {config.material, config.fluid, config.gls_enabled};
  s.dt = config.dt;
  s.n_steps = config.num_steps();
  s.profile_line = config.profile_line;
  s.profile_tol = config.profile_tol;
  s.newton = config.newton;
  return s;
}

}  // namespace

Scenario build_unconfined_compression(const SimulationConfig& config, std::shared_ptr<const Mesh> mesh) {
  Scenario s = base_scenario(config, std::move(mesh));
  for (const char* name : {"top", "bottom", "lateral", "sym_x", "sym_y"})
    if (!s.mesh->facet_sets.count(name))
      throw ConfigError(std::string("unconfined compression needs facet set '") + name + "'");

  // Height from the mesh so that read meshes work as well.
  double zmin = std::numeric_limits<double>::infinity(), zmax = -zmin;
  for (const auto& v : s.mesh->vertices) {
    zmin = std::min(zmin, v.coords.z());
    zmax = std::max(zmax, v.coords.z());
  }
  const double height = zmax - zmin;
  const double t_end = config.target_strain * height / config.rate;

  auto& b = s.bcs;
  b.displacement.push_back({"top", 2, 0.0, -config.rate, t_end});
  b.displacement.push_back({"bottom", 2, 0.0, 0.0});
  if (config.contact == ContactMode::tied) {
    for (const char* face : {"top", "bottom"}) {
      b.displacement.push_back({face, 0, 0.0, 0.0});
      b.displacement.push_back({face, 1, 0.0, 0.0});
    }
  }
  b.displacement.push_back({"sym_x", 0, 0.0, 0.0});
  b.displacement.push_back({"sym_y", 1, 0.0, 0.0});
  b.pressure.push_back({"top", 0.0});
  b.pressure.push_back({"bottom", 0.0});
  for (const char* face : {"lateral", "sym_x", "sym_y"}) b.flux.push_back({face, 0.0});
  s.check();
  return s;
}

Scenario build_unconfined_compression(const SimulationConfig& config) {
  return build_unconfined_compression(config, make_mesh(config));
}

Scenario build_terzaghi_column(const SimulationConfig& config, std::shared_ptr<const Mesh> mesh) {
  Scenario s = base_scenario(config, std::move(mesh));
  for (const char* name : {"top", "bottom", "x0", "x1", "y0", "y1"})
    if (!s.mesh->facet_sets.count(name))
      throw ConfigError(std::string("terzaghi column needs box facet set '") + name + "'");
  auto& b = s.bcs;
  b.displacement.push_back({"x0", 0, 0.0, 0.0});
  b.displacement.push_back({"x1", 0, 0.0, 0.0});
  b.displacement.push_back({"y0", 1, 0.0, 0.0});
  b.displacement.push_back({"y1", 1, 0.0, 0.0});
  b.displacement.push_back({"bottom", 2, 0.0, 0.0});
  b.pressure.push_back({"top", 0.0});
  if (config.traction != 0.0) b.traction.push_back({"top", Vec3(0, 0, -config.traction)});
  for (const char* face : {"bottom", "x0", "x1", "y0", "y1"}) b.flux.push_back({face, 0.0});
  s.check();
  return s;
}

Scenario build_terzaghi_column(const SimulationConfig& config) {
  return build_terzaghi_column(config, make_mesh(config));
}

Scenario build_scenario(const SimulationConfig& config) {
  return config.kind == ScenarioKind::terzaghi ? build_terzaghi_column(config) : build_unconfined_compression(config);
}

std::vector<SolutionState> march(const Scenario& scenario, int n_steps, const TransientSolver::StepHook& hook) {
  scenario.check();
  const DofMap dofs(*scenario.mesh);
  TransientSolver solver(*scenario.mesh, scenario.model, scenario.loading(dofs), scenario.newton);
  return solver.march(SolutionState::zero(solver.dofs()), scenario.dt, n_steps, hook);
}

}  // namespace biphasic
