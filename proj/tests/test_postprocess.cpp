#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "biphasic/errors.hpp"
#include "biphasic/postprocess.hpp"

using namespace biphasic;

namespace {

PressureProfile profile(std::vector<double> z, std::vector<double> p) {
  PressureProfile pr;
  pr.z = std::move(z);
  pr.p = std::move(p);
  return pr;
}

Mesh column_mesh(int nz) {
  MeshSpec s;
  s.shape = MeshShape::box;
  s.nz = nz;
  s.lz = 2.0 * nz;
  return generate_box(s);
}

std::filesystem::path temp_dir(const std::string& name) {
  auto d = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(d);
  std::filesystem::create_directories(d);
  return d;
}

const Line kAxis{Vec3::Zero(), Vec3::UnitZ()};

}  // namespace

TEST(Metric, MonotoneProfileHasNoOscillation) {
  const auto r = oscillation_metric(profile({0, 1, 2, 3, 4, 5, 6}, {0.0, 0.7, 1.0, 1.0, 1.0, 0.7, 0.0}));
  EXPECT_DOUBLE_EQ(r.plateau, 1.0);
  EXPECT_EQ(r.overshoot_pct, 0.0);
  EXPECT_EQ(r.undershoot_pct, 0.0);
  EXPECT_EQ(r.max_deviation_pct, 0.0);
}

TEST(Metric, SyntheticOvershoot) {
  // Mid-range of [0, 4] is z = 2, where the profile equals 1.0.
  const auto r = oscillation_metric(profile({0, 0.5, 1, 2, 4}, {0.0, 1.27, 0.9, 1.0, 1.0}));
  EXPECT_DOUBLE_EQ(r.plateau, 1.0);
  EXPECT_NEAR(r.overshoot_pct, 27.0, 1e-12);
  EXPECT_NEAR(r.undershoot_pct, 10.0, 1e-12);
  EXPECT_NEAR(r.max_deviation_pct, 27.0, 1e-12);
}

TEST(Metric, InvariantUnderPressureScaling) {
  const auto base = profile({0, 1, 2, 3, 4, 5, 6}, {0.0, 0.013, 0.009, 0.0105, 0.0098, 0.012, 0.0});
  auto scaled = base;
  for (double& p : scaled.p) p *= 37.5;
  const auto a = oscillation_metric(base), b = oscillation_metric(scaled);
  EXPECT_NEAR(a.overshoot_pct, b.overshoot_pct, 1e-10);
  EXPECT_NEAR(a.undershoot_pct, b.undershoot_pct, 1e-10);
}

TEST(Metric, UndefinedCasesThrow) {
  EXPECT_THROW(oscillation_metric(profile({0, 1, 2, 3}, {0, 1, 1, 0})), MetricError);
  EXPECT_THROW(oscillation_metric(profile({0, 1, 2, 3, 4}, {0, 0, 0, 0, 0})), MetricError);
  EXPECT_THROW(oscillation_metric(profile({0, 1, 2, 3, 4}, {0, -1, -2, -1, 0})), MetricError);
}

TEST(Profile, PeakOfEmptyProfileThrows) {
  EXPECT_THROW(PressureProfile{}.peak(), QueryError);
  EXPECT_EQ(profile({0, 1, 2}, {0.1, 0.4, 0.2}).peak(), 0.4);
}

TEST(Profile, UniformPressureGivesConstantProfile) {
  const Mesh m = column_mesh(4);
  const DofMap dofs(m);
  SolutionState s = SolutionState::zero(dofs);
  s.p.setConstant(0.25);
  const auto nodes = pressure_nodes(dofs, reference_line_nodes(m, kAxis, 1e-9));
  ASSERT_EQ(nodes.size(), 5u);
  const auto pr = extract_profile(m, dofs, s, nodes, kAxis);
  for (std::size_t i = 0; i < pr.size(); ++i) {
    EXPECT_EQ(pr.p[i], 0.25);
    EXPECT_DOUBLE_EQ(pr.z[i], 2.0 * static_cast<double>(i));
  }
}

TEST(Profile, InvalidNodeListsThrow) {
  const Mesh m = column_mesh(2);
  const DofMap dofs(m);
  const SolutionState s = SolutionState::zero(dofs);
  EXPECT_THROW(extract_profile(m, dofs, s, {}, kAxis), QueryError);
  const auto all = reference_line_nodes(m, kAxis, 1e-9);
  int midside = -1;
  for (int n : all)
    if (!dofs.has_pressure(n)) midside = n;
  ASSERT_GE(midside, 0);
  EXPECT_THROW(extract_profile(m, dofs, s, {all.front(), midside}, kAxis), QueryError);
  EXPECT_THROW(extract_profile(m, dofs, s, {all.front(), all.front()}, kAxis), QueryError);
}

TEST(Seepage, LinearPressureGivesUniformDarcyVelocity) {
  const Mesh m = column_mesh(3);
  const DofMap dofs(m);
  SolutionState s = SolutionState::zero(dofs);
  for (int n = 0; n < m.num_nodes(); ++n)
    if (dofs.has_pressure(n)) s.p(dofs.pressure_index(n)) = 0.5 + 0.2 * m.coords(n).z() - 0.1 * m.coords(n).x();
  const auto w = seepage_velocity(m, dofs, s, 2e-3);
  ASSERT_EQ(static_cast<int>(w.size()), m.num_elements());
  for (const auto& v : w) EXPECT_LT((v - Vec3(2e-4, 0.0, -4e-4)).norm(), 1e-15);
}

TEST(Vtk, CountsAndZeroState) {
  const Mesh m = column_mesh(2);
  const DofMap dofs(m);
  const auto dir = temp_dir("biphasic_vtk_test");
  write_vtk(m, dofs, SolutionState::zero(dofs), 1e-3, dir / "s.vtk");
  std::ifstream in(dir / "s.vtk");
  std::string text((std::istreambuf_iterator<char>(in)), {});
  EXPECT_EQ(text.rfind("# vtk DataFile Version", 0), 0u);
  EXPECT_NE(text.find("POINTS " + std::to_string(m.num_nodes()) + " double"), std::string::npos);
  EXPECT_NE(text.find("CELLS " + std::to_string(m.num_elements()) + ' ' + std::to_string(11 * m.num_elements())),
            std::string::npos);
  EXPECT_NE(text.find("CELL_DATA " + std::to_string(m.num_elements())), std::string::npos);
  std::istringstream ss(text.substr(text.find("CELL_TYPES")));
  std::string word;
  int count = 0;
  ss >> word >> count;
  for (int i = 0; i < count; ++i) {
    int type = 0;
    ss >> type;
    EXPECT_EQ(type, 24);
  }
  std::istringstream ps(text.substr(text.find("LOOKUP_TABLE default") + 20));
  for (int i = 0; i < m.num_nodes(); ++i) {
    double p = 1.0;
    ps >> p;
    EXPECT_EQ(p, 0.0);
  }
  std::filesystem::remove_all(dir);
}

TEST(Vtk, UnwritablePathIsIoError) {
  const Mesh m = column_mesh(1);
  const DofMap dofs(m);
  EXPECT_THROW(write_vtk(m, dofs, SolutionState::zero(dofs), 1e-3, "/nonexistent/dir/s.vtk"), IoError);
}

TEST(Csv, RoundTripIsExact) {
  std::vector<PressureProfile> in{profile({0.0, 1.0 / 3.0, 8.0}, {0.0, 0.1 + 0.2, 1e-300}),
                                  profile({0.0, 1.0 / 3.0, 8.0}, {0.0, 2.0 / 7.0, 0.0})};
  in[0].step = 1;
  in[0].t = 6.4;
  in[1].step = 2;
  in[1].t = 12.8;
  const auto dir = temp_dir("biphasic_csv_test");
  write_profile_csv(in, dir / "profile.csv");
  const auto out = read_profile_csv(dir / "profile.csv");
  ASSERT_EQ(out.size(), 2u);
  for (std::size_t k = 0; k < 2; ++k) {
    EXPECT_EQ(out[k].z, in[k].z);
    EXPECT_EQ(out[k].p, in[k].p);
    EXPECT_EQ(out[k].step, in[k].step);
    EXPECT_EQ(out[k].t, in[k].t);
  }
  std::ofstream(dir / "bad.csv") << "wrong,header\n";
  EXPECT_THROW(read_profile_csv(dir / "bad.csv"), ParseError);
  std::filesystem::remove_all(dir);
}

TEST(Summary, ReportsStabilizationAndMetrics) {
  RunSummary s;
  s.config.gls_enabled = true;
  s.tau_min = 1.5;
  s.tau_max = 3.0;
  s.has_report = true;
  s.report.overshoot_pct = 12.5;
  s.steps = {{1, 6.4, 3, 1, 0.004}, {2, 12.8, 4, 1, 0.005}};
  std::ostringstream out;
  write_summary(s, out);
  const std::string text = out.str();
  EXPECT_NE(text.find("gls_enabled = true"), std::string::npos);
  EXPECT_NE(text.find("tau_min = 1.5"), std::string::npos);
  EXPECT_NE(text.find("tau_max = 3"), std::string::npos);
  EXPECT_NE(text.find("overshoot_pct = 12.5"), std::string::npos);
  EXPECT_NE(text.find("newton_iters_total = 7"), std::string::npos);
  EXPECT_EQ(s.newton_iters_total(), 7);
}
