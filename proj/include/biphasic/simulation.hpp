#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "biphasic/postprocess.hpp"
#include "biphasic/scenario.hpp"

namespace biphasic {

struct RunResult {
  RunSummary summary;
  std::vector<PressureProfile> profiles;  // one per step, step 0 included
  SolutionState final_state;
  std::vector<int> line_nodes;  // corner nodes on the reference line
};

/// Builds the scenario, marches it and evaluates the oscillation metric on the
/// final profile. Writes VTK/CSV/summary when config.output_dir is set.
RunResult run_simulation(const SimulationConfig& config);
RunResult run_simulation(const Scenario& scenario, const SimulationConfig& config);

enum class SweepAxis { permeability, mesh, dt, rate, strain };

SweepAxis parse_sweep_axis(const std::string& name);
std::string to_string(SweepAxis axis);

struct SweepSpec {
  SweepAxis axis = SweepAxis::permeability;
  std::vector<double> values;
  SimulationConfig base;

  void validate() const;
};

/// Mesh resolution level (1..4) to a quarter-cylinder spec with 5, 7, 9 or
/// 12 elements along the axis.
MeshSpec mesh_level_spec(int level, const MeshSpec& base);

SimulationConfig apply_sweep_value(const SimulationConfig& base, SweepAxis axis, double value);

struct SweepRow {
  double axis_value = 0.0;
  bool gls = false;
  bool ok = false;
  double overshoot_pct = 0.0;
  double undershoot_pct = 0.0;
  double peak_pressure = 0.0;
  int newton_iters_total = 0;
  std::string error;
};

/// One run per value and per GLS setting (off, then on). Failures are
/// recorded in the row and the sweep continues. Each run writes into
/// `<out_dir>/<axis>_<i>_gls<0|1>` when out_dir is set.
std::vector<SweepRow> run_sweep(const SweepSpec& spec, const std::filesystem::path& out_dir = {});

void write_sweep_csv(const std::vector<SweepRow>& rows, const std::filesystem::path& path);

}  // namespace biphasic
