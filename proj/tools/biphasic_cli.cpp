// Command-line driver: mesh, solve, verify, sweep.
//
// Exit codes: 0 success, 1 failed verification or sweep row, 2 usage error,
// 3 configuration error, 4 step failure, 5 IO error, 6 mesh/geometry error.

#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "biphasic/errors.hpp"
#include "biphasic/mesh.hpp"
#include "biphasic/simulation.hpp"
#include "biphasic/verify.hpp"

namespace {

enum Exit { kOk = 0, kFailed = 1, kUsage = 2, kConfig = 3, kStep = 4, kIo = 5, kMesh = 6 };

using namespace biphasic;

int report(const char* what, const std::exception& e, int code) {
  std::cerr << "biphasic: " << what << ": " << e.what() << '\n';
  return code;
}

/// Maps library exceptions to exit codes.
template <class Fn>
int guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const StepFailure& e) {
    return report("step failure", e, kStep);
  } catch (const IoError& e) {
    return report("io error", e, kIo);
  } catch (const ParseError& e) {
    return report("parse error", e, kMesh);
  } catch (const ValidationError& e) {
    return report("invalid mesh", e, kMesh);
  } catch (const GeometryError& e) {
    return report("geometry error", e, kMesh);
  } catch (const ConfigError& e) {
    return report("config error", e, kConfig);
  } catch (const Error& e) {
    return report("error", e, kFailed);
  }
}

std::vector<double> split_values(const std::vector<std::string>& items) {
  std::vector<double> out;
  for (const auto& item : items) {
    std::stringstream ss(item);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (tok.empty()) continue;
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tok.size()) throw CLI::ValidationError("--values", "not a number: '" + tok + "'");
      out.push_back(v);
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Biphasic (solid + fluid) finite-strain Taylor-Hood solver"};
  app.require_subcommand(1);

  // mesh
  auto* mesh_cmd = app.add_subcommand("mesh", "Generate a structured Tet10 mesh and print its size");
  std::string shape, mesh_out;
  MeshSpec spec;
  int level = 0;
  mesh_cmd->add_option("--shape", shape, "box or quarter_cylinder")->required()->check(
      CLI::IsMember({"box", "quarter_cylinder"}));
  mesh_cmd->add_option("--radius", spec.radius, "cylinder radius (mm)");
  mesh_cmd->add_option("--height", spec.height, "cylinder height (mm)");
  mesh_cmd->add_option("--nc", spec.nc, "core cells per side");
  mesh_cmd->add_option("--nr", spec.nr, "ring cells in the radial direction");
  mesh_cmd->add_option("--lx", spec.lx, "box size x (mm)");
  mesh_cmd->add_option("--ly", spec.ly, "box size y (mm)");
  mesh_cmd->add_option("--lz", spec.lz, "box size z (mm)");
  mesh_cmd->add_option("--nx", spec.nx, "box cells along x");
  mesh_cmd->add_option("--ny", spec.ny, "box cells along y");
  mesh_cmd->add_option("--nz", spec.nz, "cells along z");
  mesh_cmd->add_option("--level", level, "cylinder resolution level 1-4 (overrides nc/nr/nz)")->check(
      CLI::Range(1, 4));
  mesh_cmd->add_option("-o,--output", mesh_out, "mesh file to write");

  // solve
  auto* solve_cmd = app.add_subcommand("solve", "Run a simulation from a config file");
  std::string config_path, out_dir;
  std::vector<std::string> overrides;
  solve_cmd->add_option("config", config_path, "config file")->required();
  solve_cmd->add_option("--set", overrides, "override, key=value (repeatable)");
  solve_cmd->add_option("-o,--out", out_dir, "output directory (overrides output.dir)");

  // verify
  auto* verify_cmd = app.add_subcommand("verify", "Run the built-in verification checks");
  int refine = 1;
  std::string fault;
  verify_cmd->add_option("--terzaghi-refine", refine, "refinement levels for the consolidation study")->check(
      CLI::Range(1, 5));
  verify_cmd->add_option("--inject-fault", fault, "deliberately break a component (testing)")
      ->check(CLI::IsMember({"tangent"}))
      ->group("");

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "Parameter sweep, GLS off and on for every value");
  std::string axis, sweep_config, sweep_out;
  std::vector<std::string> value_items, sweep_overrides;
  sweep_cmd->add_option("--axis", axis, "permeability, mesh, dt, rate or strain")->required();
  sweep_cmd->add_option("--values", value_items, "values, comma or space separated")->required();
  sweep_cmd->add_option("--config", sweep_config, "base config file")->required();
  sweep_cmd->add_option("--set", sweep_overrides, "override on the base config, key=value (repeatable)");
  sweep_cmd->add_option("-o,--out", sweep_out, "output directory for sweep.csv and per-run outputs")->required();

  std::vector<double> values;
  try {
    app.parse(argc, argv);
    if (*sweep_cmd) {
      values = split_values(value_items);
      if (values.empty()) throw CLI::ValidationError("--values", "at least one value is required");
    }
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  if (*mesh_cmd) {
    return guarded([&] {
      spec.shape = shape == "box" ? MeshShape::box : MeshShape::quarter_cylinder;
      if (level > 0) spec = mesh_level_spec(level, spec);
      const Mesh mesh = generate_mesh(spec);
      if (!mesh_out.empty()) write_mesh(mesh, mesh_out);
      int line_elements = 0;
      try {
        const auto nodes = reference_line_nodes(mesh, {Vec3::Zero(), Vec3::UnitZ()}, 1e-6);
        for (int n : nodes) line_elements += mesh.corner_mask()[static_cast<std::size_t>(n)] ? 1 : 0;
        --line_elements;
      } catch (const QueryError&) {
        line_elements = 0;
      }
      std::cout << "nodes " << mesh.num_nodes() << "\nelements " << mesh.num_elements()
                << "\nreference_line_elements " << line_elements << '\n';
      return static_cast<int>(kOk);
    });
  }

  if (*solve_cmd) {
    return guarded([&] {
      SimulationConfig c = load_config(config_path);
      for (const auto& o : overrides) apply_override(c, o);
      if (!out_dir.empty()) c.output_dir = out_dir;
      c.validate();
      const RunResult r = run_simulation(c);
      write_summary(r.summary, std::cout);
      return static_cast<int>(kOk);
    });
  }

  if (*verify_cmd) {
    return guarded([&] {
      VerifyOptions opt;
      opt.terzaghi_refine = refine;
      if (fault == "tangent")
        opt.tangent = [](const Kinematics& k, const NeoHookeParams& p) {
          Voigt6 d = spatial_tangent(k, p);
          d.bottomRightCorner<3, 3>() *= 2.0;  // tensor shear modulus used with engineering strain
          return d;
        };
      const auto checks = run_verification(opt);
      print_checks(checks, std::cout);
      const bool ok = std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
      return static_cast<int>(ok ? kOk : kFailed);
    });
  }

  return guarded([&] {
    SweepSpec s;
    s.axis = parse_sweep_axis(axis);
    s.values = values;
    s.base = load_config(sweep_config);
    for (const auto& o : sweep_overrides) apply_override(s.base, o);
    std::filesystem::create_directories(sweep_out);
    const auto rows = run_sweep(s, sweep_out);
    write_sweep_csv(rows, std::filesystem::path(sweep_out) / "sweep.csv");
    bool ok = true;
    for (const auto& r : rows) {
      std::cout << to_string(s.axis) << '=' << r.axis_value << " gls=" << r.gls << ' '
                << (r.ok ? "peak=" + std::to_string(r.peak_pressure) : "FAILED " + r.error) << '\n';
      ok = ok && r.ok;
    }
    return static_cast<int>(ok ? kOk : kFailed);
  });
}
