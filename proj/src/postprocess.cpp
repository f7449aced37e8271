#include "biphasic/postprocess.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "biphasic/errors.hpp"
#include "biphasic/fem.hpp"

namespace biphasic {

namespace {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

double interpolate(const PressureProfile& prof, double z) {
  const auto it = std::lower_bound(prof.z.begin(), prof.z.end(), z);
  if (it == prof.z.begin()) return prof.p.front();
  if (it == prof.z.end()) return prof.p.back();
  const auto i = static_cast<std::size_t>(it - prof.z.begin());
  const double s = (z - prof.z[i - 1]) / (prof.z[i] - prof.z[i - 1]);
  return (1.0 - s) * prof.p[i - 1] + s * prof.p[i];
}

}  // namespace

double PressureProfile::peak() const {
  if (p.empty()) throw QueryError("empty pressure profile");
  return *std::max_element(p.begin(), p.end());
}

std::vector<int> pressure_nodes(const DofMap& dofs, const std::vector<int>& nodes) {
  std::vector<int> out;
  for (int n : nodes)
    if (dofs.has_pressure(n)) out.push_back(n);
  return out;
}

PressureProfile extract_profile(const Mesh& mesh, const DofMap& dofs, const SolutionState& state,
                                const std::vector<int>& line_nodes, const Line& line) {
  if (line_nodes.empty()) throw QueryError("no nodes on the reference line");
  std::vector<std::pair<double, double>> pts;
  pts.reserve(line_nodes.size());
  for (int n : line_nodes) {
    if (n < 0 || n >= mesh.num_nodes()) throw QueryError("node " + std::to_string(n) + " does not exist");
    if (!dofs.has_pressure(n)) throw QueryError("node " + std::to_string(n) + " carries no pressure dof");
    pts.emplace_back(line_coordinate(line, mesh.coords(n)), state.pressure(dofs, n));
  }
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  PressureProfile prof;
  prof.t = state.t;
  for (const auto& [z, p] : pts) {
    if (!prof.z.empty() && !(z > prof.z.back())) throw QueryError("reference line nodes share a coordinate");
    prof.z.push_back(z);
    prof.p.push_back(p);
  }
  return prof;
}

OscillationReport oscillation_metric(const PressureProfile& profile) {
  if (profile.size() < 5) throw MetricError("oscillation metric needs at least 5 profile points");
  if (profile.p.size() != profile.z.size()) throw MetricError("profile coordinate/pressure size mismatch");
  const double z0 = profile.z.front(), z1 = profile.z.back();
  const double length = z1 - z0;
  OscillationReport r;
  r.plateau = interpolate(profile, z0 + 0.5 * length);
  if (!(r.plateau > 0)) throw MetricError("plateau pressure is not positive; oscillation metric undefined");

  const double pmax = *std::max_element(profile.p.begin(), profile.p.end());
  double pmin = std::numeric_limits<double>::infinity();
  const double lo = z0 + 0.25 * length, hi = z1 - 0.25 * length;
  for (std::size_t i = 0; i < profile.size(); ++i)
    if (profile.z[i] >= lo - 1e-12 * length && profile.z[i] <= hi + 1e-12 * length) pmin = std::min(pmin, profile.p[i]);
  if (!std::isfinite(pmin)) pmin = r.plateau;

  r.overshoot_pct = std::max(0.0, pmax - r.plateau) / r.plateau * 100.0;
  r.undershoot_pct = std::max(0.0, r.plateau - pmin) / r.plateau * 100.0;
  r.max_deviation_pct = std::max(r.overshoot_pct, r.undershoot_pct);
  return r;
}

std::vector<Vec3> seepage_velocity(const Mesh& mesh, const DofMap& dofs, const SolutionState& state, double k) {
  const auto& rule = quadrature_tet4pt();
  std::vector<Vec3> w(static_cast<std::size_t>(mesh.num_elements()), Vec3::Zero());
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const auto& el = mesh.elements[static_cast<std::size_t>(e)];
    Eigen::Matrix<double, 10, 3> x;
    for (std::size_t a = 0; a < 10; ++a)
      x.row(static_cast<int>(a)) = (mesh.coords(el.nodes[a]) + state.u.segment<3>(dofs.u_dof(el.nodes[a], 0))).transpose();
    Eigen::Vector4d pe;
    for (std::size_t a = 0; a < 4; ++a) pe(static_cast<int>(a)) = state.pressure(dofs, el.nodes[a]);
    Vec3 sum = Vec3::Zero();
    double vol = 0.0;
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const Tet10Shape s10 = shape_tet10(rule.points[q]);
      const Tet4Shape s4 = shape_tet4(rule.points[q]);
      const Mat3 dx = x.transpose() * s10.gradients;  // dx/dxi
      const double dv = rule.weights[q] * dx.determinant();
      const Eigen::Matrix<double, 4, 3> grad = s4.gradients * dx.inverse();
      sum += -k * (grad.transpose() * pe) * dv;
      vol += dv;
    }
    w[static_cast<std::size_t>(e)] = sum / vol;
  }
  return w;
}

void write_vtk(const Mesh& mesh, const DofMap& dofs, const SolutionState& state, double k,
               const std::filesystem::path& path) {
  const int n = mesh.num_nodes();
  std::vector<double> p(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i)
    if (dofs.has_pressure(i)) p[static_cast<std::size_t>(i)] = state.pressure(dofs, i);
  for (const auto& el : mesh.elements)
    for (std::size_t e = 0; e < 6; ++e) {
      const auto [a, b] = kTet10Edges[e];
      p[static_cast<std::size_t>(el.nodes[4 + e])] =
          0.5 * (p[static_cast<std::size_t>(el.nodes[static_cast<std::size_t>(a)])] +
                 p[static_cast<std::size_t>(el.nodes[static_cast<std::size_t>(b)])]);
    }
  const auto w = seepage_velocity(mesh, dofs, state, k);

  auto out = open_out(path);
  out << "# vtk DataFile Version 4.2\n";
  out << "biphasic t=" << g17(state.t) << "\n";
  out << "ASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << n << " double\n";
  for (const auto& v : mesh.vertices)
    out << g17(v.coords.x()) << ' ' << g17(v.coords.y()) << ' ' << g17(v.coords.z()) << '\n';
  out << "CELLS " << mesh.num_elements() << ' ' << 11 * mesh.num_elements() << '\n';
  for (const auto& el : mesh.elements) {
    out << 10;
    for (int id : el.nodes) out << ' ' << id;
    out << '\n';
  }
  out << "CELL_TYPES " << mesh.num_elements() << '\n';
  for (int e = 0; e < mesh.num_elements(); ++e) out << "24\n";
  out << "POINT_DATA " << n << '\n';
  out << "VECTORS displacement double\n";
  for (int i = 0; i < n; ++i)
    out << g17(state.u(3 * i)) << ' ' << g17(state.u(3 * i + 1)) << ' ' << g17(state.u(3 * i + 2)) << '\n';
  out << "SCALARS pressure double 1\nLOOKUP_TABLE default\n";
  for (double v : p) out << g17(v) << '\n';
  out << "CELL_DATA " << mesh.num_elements() << '\n';
  out << "VECTORS seepage_velocity double\n";
  for (const auto& v : w) out << g17(v.x()) << ' ' << g17(v.y()) << ' ' << g17(v.z()) << '\n';
  finish(out, path);
}

void write_profile_csv(const std::vector<PressureProfile>& profiles, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "z_mm,p_mpa,step,time_s\n";
  for (const auto& prof : profiles)
    for (std::size_t i = 0; i < prof.size(); ++i)
      out << g17(prof.z[i]) << ',' << g17(prof.p[i]) << ',' << prof.step << ',' << g17(prof.t) << '\n';
  finish(out, path);
}

std::vector<PressureProfile> read_profile_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "z_mm,p_mpa,step,time_s")
    throw ParseError(path.string() + ": missing profile header", 1);
  std::vector<PressureProfile> out;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string f[4];
    for (auto& s : f)
      if (!std::getline(row, s, ',')) throw ParseError(path.string() + ": expected 4 columns", line_no);
    try {
      const int step = std::stoi(f[2]);
      if (out.empty() || out.back().step != step) {
        out.emplace_back();
        out.back().step = step;
        out.back().t = std::stod(f[3]);
      }
      out.back().z.push_back(std::stod(f[0]));
      out.back().p.push_back(std::stod(f[1]));
    } catch (const std::logic_error&) {
      throw ParseError(path.string() + ": malformed number", line_no);
    }
  }
  return out;
}

int RunSummary::newton_iters_total() const {
  int total = 0;
  for (const auto& s : steps) total += s.newton_iterations;
  return total;
}

void write_summary(const RunSummary& s, std::ostream& out) {
  out << "[run]\n";
  out << "gls_enabled = " << (s.config.gls_enabled ? "true" : "false") << '\n';
  out << "nodes = " << s.num_nodes << '\n';
  out << "elements = " << s.num_elements << '\n';
  out << "reference_line_elements = " << s.line_elements << '\n';
  out << "tau_min = " << g17(s.tau_min) << '\n';
  out << "tau_max = " << g17(s.tau_max) << '\n';
  out << "newton_iters_total = " << s.newton_iters_total() << '\n';
  out << "\n[metrics]\n";
  out << "peak_pressure_mpa = " << g17(s.peak_pressure) << '\n';
  if (s.has_report) {
    out << "plateau_pressure_mpa = " << g17(s.report.plateau) << '\n';
    out << "overshoot_pct = " << g17(s.report.overshoot_pct) << '\n';
    out << "undershoot_pct = " << g17(s.report.undershoot_pct) << '\n';
    out << "max_deviation_pct = " << g17(s.report.max_deviation_pct) << '\n';
  } else {
    out << "metric_error = " << s.report_error << '\n';
  }
  out << "\n[steps]\n";
  out << "# step time_s newton_iterations substeps peak_pressure_mpa\n";
  for (const auto& st : s.steps)
    out << st.step << ' ' << g17(st.t) << ' ' << st.newton_iterations << ' ' << st.substeps << ' '
        << g17(st.peak_pressure) << '\n';
  out << "\n[config]\n" << format_config(s.config);
}

void write_summary(const RunSummary& summary, const std::filesystem::path& path) {
  auto out = open_out(path);
  write_summary(summary, out);
  finish(out, path);
}

}  // namespace biphasic
