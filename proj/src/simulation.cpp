#include "biphasic/simulation.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "biphasic/errors.hpp"

namespace biphasic {

RunResult run_simulation(const Scenario& scenario, const SimulationConfig& config) {
  scenario.check();
  const Mesh& mesh = *scenario.mesh;
  const DofMap dofs(mesh);
  TransientSolver solver(mesh, scenario.model, scenario.loading(dofs), scenario.newton);

  RunResult result;
  result.line_nodes =
      pressure_nodes(dofs, reference_line_nodes(mesh, scenario.profile_line, scenario.profile_tol));

  RunSummary& s = result.summary;
  s.config = config;
  s.num_nodes = mesh.num_nodes();
  s.num_elements = mesh.num_elements();
  s.line_elements = static_cast<int>(result.line_nodes.size()) - 1;
  if (scenario.model.gls_enabled) {
    const auto tau = element_tau(mesh, scenario.model.permeability.k, scenario.dt);
    s.tau_min = *std::min_element(tau.begin(), tau.end());
    s.tau_max = *std::max_element(tau.begin(), tau.end());
  }

  const bool write = !config.output_dir.empty();
  if (write) {
    std::error_code ec;
    std::filesystem::create_directories(config.output_dir, ec);
    if (ec) throw IoError("cannot create output directory " + config.output_dir.string() + ": " + ec.message());
  }
  auto vtk_path = [&](int step) { return config.output_dir / ("step_" + std::to_string(step) + ".vtk"); };
  const int n_steps = scenario.n_steps;

  auto record = [&](int step, const SolutionState& state) {
    PressureProfile prof = extract_profile(mesh, dofs, state, result.line_nodes, scenario.profile_line);
    prof.step = step;
    result.profiles.push_back(std::move(prof));
    if (write && config.vtk_every > 0 && (step % config.vtk_every == 0 || step == n_steps))
      write_vtk(mesh, dofs, state, scenario.model.permeability.k, vtk_path(step));
  };

  SolutionState initial = SolutionState::zero(dofs);
  record(0, initial);
  auto states = solver.march(initial, scenario.dt, n_steps, [&](int step, const StepResult& r) {
    record(step, r.state);
    s.steps.push_back({step, r.state.t, r.iterations, r.substeps, result.profiles.back().peak()});
  });
  result.final_state = std::move(states.back());

  const PressureProfile& last = result.profiles.back();
  s.peak_pressure = last.peak();
  try {
    s.report = oscillation_metric(last);
    s.has_report = true;
  } catch (const MetricError& e) {
    s.report_error = e.what();
  }

  if (write) {
    write_profile_csv(result.profiles, config.output_dir / "profile.csv");
    write_summary(s, config.output_dir / "summary.txt");
  }
  return result;
}

RunResult run_simulation(const SimulationConfig& config) {
  return run_simulation(build_scenario(config), config);
}

SweepAxis parse_sweep_axis(const std::string& name) {
  if (name == "permeability") return SweepAxis::permeability;
  if (name == "mesh") return SweepAxis::mesh;
  if (name == "dt") return SweepAxis::dt;
  if (name == "rate") return SweepAxis::rate;
  if (name == "strain") return SweepAxis::strain;
  throw ConfigError("unknown sweep axis '" + name + "' (permeability, mesh, dt, rate, strain)");
}

std::string to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::permeability: return "permeability";
    case SweepAxis::mesh: return "mesh";
    case SweepAxis::dt: return "dt";
    case SweepAxis::rate: return "rate";
    case SweepAxis::strain: return "strain";
  }
  return "?";
}

MeshSpec mesh_level_spec(int level, const MeshSpec& base) {
  static constexpr int kAxial[] = {5, 7, 9, 12};
  static constexpr int kCore[] = {3, 5, 6, 6};
  static constexpr int kRing[] = {3, 5, 6, 6};
  if (level < 1 || level > 4) throw ConfigError("mesh level must be 1, 2, 3 or 4");
  MeshSpec s = base;
  s.shape = MeshShape::quarter_cylinder;
  s.nz = kAxial[level - 1];
  s.nc = kCore[level - 1];
  s.nr = kRing[level - 1];
  return s;
}

void SweepSpec::validate() const {
  if (values.empty()) throw ConfigError("sweep needs at least one value");
  for (double v : values) (void)apply_sweep_value(base, axis, v);
}

SimulationConfig apply_sweep_value(const SimulationConfig& base, SweepAxis axis, double value) {
  SimulationConfig c = base;
  switch (axis) {
    case SweepAxis::permeability: c.fluid.k = value; break;
    case SweepAxis::mesh:
      if (value != std::round(value)) throw ConfigError("mesh sweep values must be integer levels");
      c.mesh = mesh_level_spec(static_cast<int>(value), base.mesh);
      c.mesh_path.clear();
      break;
    case SweepAxis::dt: c.dt = value; break;
    case SweepAxis::rate: c.rate = value; break;
    case SweepAxis::strain: c.target_strain = value; break;
  }
  c.validate();
  return c;
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec, const std::filesystem::path& out_dir) {
  spec.validate();
  std::vector<SweepRow> rows;
  for (std::size_t i = 0; i < spec.values.size(); ++i) {
    for (bool gls : {false, true}) {
      SweepRow row;
      row.axis_value = spec.values[i];
      row.gls = gls;
      try {
        SimulationConfig c = apply_sweep_value(spec.base, spec.axis, spec.values[i]);
        c.gls_enabled = gls;
        c.output_dir.clear();
        if (!out_dir.empty())
          c.output_dir = out_dir / (to_string(spec.axis) + "_" + std::to_string(i) + (gls ? "_gls1" : "_gls0"));
        const RunResult r = run_simulation(c);
        row.peak_pressure = r.summary.peak_pressure;
        row.newton_iters_total = r.summary.newton_iters_total();
        if (r.summary.has_report) {
          row.overshoot_pct = r.summary.report.overshoot_pct;
          row.undershoot_pct = r.summary.report.undershoot_pct;
          row.ok = true;
        } else {
          row.error = r.summary.report_error;
        }
      } catch (const Error& e) {
        row.error = e.what();
      }
      rows.push_back(row);
    }
  }
  return rows;
}

void write_sweep_csv(const std::vector<SweepRow>& rows, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  auto g = [](double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  out << "axis_value,gls,overshoot_pct,undershoot_pct,peak_pressure_mpa,newton_iters_total,status\n";
  for (const auto& r : rows) {
    std::string status = r.ok ? "ok" : "failed: " + r.error;
    for (char& ch : status)
      if (ch == ',' || ch == '\n') ch = ';';
    out << g(r.axis_value) << ',' << (r.gls ? 1 : 0) << ',' << g(r.overshoot_pct) << ',' << g(r.undershoot_pct) << ','
        << g(r.peak_pressure) << ',' << r.newton_iters_total << ',' << status << '\n';
  }
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace biphasic
