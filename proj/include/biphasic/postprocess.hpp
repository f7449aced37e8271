#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "biphasic/mesh.hpp"
#include "biphasic/scenario.hpp"
#include "biphasic/solver.hpp"

namespace biphasic {

/// Nodal pressures along a reference line at one instant.
struct PressureProfile {
  std::vector<double> z;  // mm, strictly increasing
  std::vector<double> p;  // MPa
  double t = 0.0;
  int step = 0;

  std::size_t size() const { return z.size(); }
  double peak() const;
};

/// Pressure oscillation measures, all relative to the mid-thickness plateau.
struct OscillationReport {
  double plateau = 0.0;  // MPa
  double overshoot_pct = 0.0;
  double undershoot_pct = 0.0;
  double max_deviation_pct = 0.0;
};

/// Keeps the nodes that carry a pressure dof, preserving order.
std::vector<int> pressure_nodes(const DofMap& dofs, const std::vector<int>& nodes);

/// Pressures of `line_nodes` (corner nodes) ordered along the line. Throws
/// QueryError on an empty list, a midside node or repeated coordinates.
PressureProfile extract_profile(const Mesh& mesh, const DofMap& dofs, const SolutionState& state,
                                const std::vector<int>& line_nodes, const Line& line);

/// Plateau = profile interpolated at the middle of its coordinate range.
/// Overshoot uses the whole profile, undershoot the central half (which
/// excludes the drained end nodes). Throws MetricError for fewer than 5
/// points or a non-positive plateau.
OscillationReport oscillation_metric(const PressureProfile& profile);

/// Cell average of w = -k grad p over the current configuration.
std::vector<Vec3> seepage_velocity(const Mesh& mesh, const DofMap& dofs, const SolutionState& state, double k);

/// Legacy ASCII VTK unstructured grid (reference coordinates, quadratic
/// tetrahedra) with displacement, pressure and seepage_velocity.
void write_vtk(const Mesh& mesh, const DofMap& dofs, const SolutionState& state, double k,
               const std::filesystem::path& path);

void write_profile_csv(const std::vector<PressureProfile>& profiles, const std::filesystem::path& path);
std::vector<PressureProfile> read_profile_csv(const std::filesystem::path& path);

struct StepSummary {
  int step = 0;
  double t = 0.0;
  int newton_iterations = 0;
  int substeps = 1;
  double peak_pressure = 0.0;
};

struct RunSummary {
  SimulationConfig config;
  int num_nodes = 0;
  int num_elements = 0;
  int line_elements = 0;
  double tau_min = 0.0;
  double tau_max = 0.0;
  double peak_pressure = 0.0;
  bool has_report = false;
  OscillationReport report;
  std::string report_error;
  std::vector<StepSummary> steps;
  int newton_iters_total() const;
};

void write_summary(const RunSummary& summary, std::ostream& out);
void write_summary(const RunSummary& summary, const std::filesystem::path& path);

}  // namespace biphasic
