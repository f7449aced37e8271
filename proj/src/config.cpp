#include <charconv>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "biphasic/errors.hpp"
#include "biphasic/scenario.hpp"

namespace biphasic {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double to_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) throw ConfigError(key + ": expected a number, got '" + text + "'");
  return v;
}

int to_int(const std::string& key, const std::string& text) {
  int v = 0;
  const char* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) throw ConfigError(key + ": expected an integer, got '" + text + "'");
  return v;
}

bool to_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw ConfigError(key + ": expected true or false, got '" + text + "'");
}

struct KeyDef {
  std::string name;
  std::function<void(SimulationConfig&, const std::string& key, const std::string& value)> set;
  std::function<std::string(const SimulationConfig&)> get;  // empty result: omitted on save
};

KeyDef real(const std::string& name, double SimulationConfig::*field) {
  return {name, [field](SimulationConfig& c, const std::string& k, const std::string& v) { c.*field = to_double(k, v); },
          [field](const SimulationConfig& c) { return fmt(c.*field); }};
}

template <class Get>
KeyDef real_ref(const std::string& name, Get get) {
  return {name, [get](SimulationConfig& c, const std::string& k, const std::string& v) { get(c) = to_double(k, v); },
          [get](const SimulationConfig& c) { return fmt(get(const_cast<SimulationConfig&>(c))); }};
}

template <class Get>
KeyDef integer_ref(const std::string& name, Get get) {
  return {name, [get](SimulationConfig& c, const std::string& k, const std::string& v) { get(c) = to_int(k, v); },
          [get](const SimulationConfig& c) { return std::to_string(get(const_cast<SimulationConfig&>(c))); }};
}

const std::vector<KeyDef>& key_table() {
  static const std::vector<KeyDef> table = [] {
    std::vector<KeyDef> t;
    t.push_back({"scenario.type",
                 [](SimulationConfig& c, const std::string& k, const std::string& v) {
                   if (v == "unconfined_compression")
                     c.kind = ScenarioKind::unconfined_compression;
                   else if (v == "terzaghi")
                     c.kind = ScenarioKind::terzaghi;
                   else
                     throw ConfigError(k + ": expected unconfined_compression or terzaghi, got '" + v + "'");
                 },
                 [](const SimulationConfig& c) {
                   return std::string(c.kind == ScenarioKind::terzaghi ? "terzaghi" : "unconfined_compression");
                 }});
    t.push_back({"scenario.contact",
                 [](SimulationConfig& c, const std::string& k, const std::string& v) {
                   if (v == "frictionless")
                     c.contact = ContactMode::frictionless;
                   else if (v == "tied")
                     c.contact = ContactMode::tied;
                   else
                     throw ConfigError(k + ": expected frictionless or tied, got '" + v + "'");
                 },
                 [](const SimulationConfig& c) {
                   return std::string(c.contact == ContactMode::tied ? "tied" : "frictionless");
                 }});
    t.push_back({"mesh.shape",
                 [](SimulationConfig& c, const std::string& k, const std::string& v) {
                   if (v == "box")
                     c.mesh.shape = MeshShape::box;
                   else if (v == "quarter_cylinder")
                     c.mesh.shape = MeshShape::quarter_cylinder;
                   else
                     throw ConfigError(k + ": expected box or quarter_cylinder, got '" + v + "'");
                 },
                 [](const SimulationConfig& c) {
                   return std::string(c.mesh.shape == MeshShape::box ? "box" : "quarter_cylinder");
                 }});
    t.push_back({"mesh.path",
                 [](SimulationConfig& c, const std::string&, const std::string& v) { c.mesh_path = v; },
                 [](const SimulationConfig& c) { return c.mesh_path.string(); }});
    t.push_back(real_ref("mesh.radius_mm", [](SimulationConfig& c) -> double& { return c.mesh.radius; }));
    t.push_back(real_ref("mesh.height_mm", [](SimulationConfig& c) -> double& { return c.mesh.height; }));
    t.push_back(real_ref("mesh.core_fraction", [](SimulationConfig& c) -> double& { return c.mesh.core_fraction; }));
    t.push_back(integer_ref("mesh.nc", [](SimulationConfig& c) -> int& { return c.mesh.nc; }));
    t.push_back(integer_ref("mesh.nr", [](SimulationConfig& c) -> int& { return c.mesh.nr; }));
    t.push_back(integer_ref("mesh.nz", [](SimulationConfig& c) -> int& { return c.mesh.nz; }));
    t.push_back(real_ref("mesh.lx_mm", [](SimulationConfig& c) -> double& { return c.mesh.lx; }));
    t.push_back(real_ref("mesh.ly_mm", [](SimulationConfig& c) -> double& { return c.mesh.ly; }));
    t.push_back(real_ref("mesh.lz_mm", [](SimulationConfig& c) -> double& { return c.mesh.lz; }));
    t.push_back(integer_ref("mesh.nx", [](SimulationConfig& c) -> int& { return c.mesh.nx; }));
    t.push_back(integer_ref("mesh.ny", [](SimulationConfig& c) -> int& { return c.mesh.ny; }));
    t.push_back(real_ref("material.lambda_mpa", [](SimulationConfig& c) -> double& { return c.material.lambda; }));
    t.push_back(real_ref("material.mu_mpa", [](SimulationConfig& c) -> double& { return c.material.mu; }));
    t.push_back(real_ref("fluid.permeability_mm4_per_Ns", [](SimulationConfig& c) -> double& { return c.fluid.k; }));
    t.push_back(real("time.dt_s", &SimulationConfig::dt));
    t.push_back(real("time.rate_mm_per_s", &SimulationConfig::rate));
    t.push_back(real("time.target_strain", &SimulationConfig::target_strain));
    t.push_back(real("time.end_s", &SimulationConfig::end_time));
    t.push_back(real("load.traction_mpa", &SimulationConfig::traction));
    t.push_back({"stabilization.gls_enabled",
                 [](SimulationConfig& c, const std::string& k, const std::string& v) { c.gls_enabled = to_bool(k, v); },
                 [](const SimulationConfig& c) { return std::string(c.gls_enabled ? "true" : "false"); }});
    t.push_back(integer_ref("solver.max_iters", [](SimulationConfig& c) -> int& { return c.newton.max_iters; }));
    t.push_back(integer_ref("solver.max_step_halvings",
                            [](SimulationConfig& c) -> int& { return c.newton.max_step_halvings; }));
    t.push_back(real_ref("solver.rel_tol", [](SimulationConfig& c) -> double& { return c.newton.rel_tol; }));
    t.push_back(real_ref("solver.abs_tol", [](SimulationConfig& c) -> double& { return c.newton.abs_tol; }));
    t.push_back({"output.dir",
                 [](SimulationConfig& c, const std::string&, const std::string& v) { c.output_dir = v; },
                 [](const SimulationConfig& c) { return c.output_dir.string(); }});
    t.push_back(integer_ref("output.vtk_every", [](SimulationConfig& c) -> int& { return c.vtk_every; }));
    t.push_back({"output.profile_line",
                 [](SimulationConfig& c, const std::string& k, const std::string& v) {
                   std::istringstream in(v);
                   std::vector<double> xs;
                   std::string tok;
                   while (in >> tok) xs.push_back(to_double(k, tok));
                   if (xs.size() != 6) throw ConfigError(k + ": expected 6 numbers 'px py pz dx dy dz'");
                   c.profile_line.point = Vec3(xs[0], xs[1], xs[2]);
                   c.profile_line.direction = Vec3(xs[3], xs[4], xs[5]);
                 },
                 [](const SimulationConfig& c) {
                   const auto& l = c.profile_line;
                   return fmt(l.point.x()) + " " + fmt(l.point.y()) + " " + fmt(l.point.z()) + " " +
                          fmt(l.direction.x()) + " " + fmt(l.direction.y()) + " " + fmt(l.direction.z());
                 }});
    t.push_back(real("output.profile_tol_mm", &SimulationConfig::profile_tol));
    return t;
  }();
  return table;
}

const KeyDef* find_key(const std::string& name) {
  for (const auto& k : key_table())
    if (k.name == name) return &k;
  return nullptr;
}

const std::vector<std::string>& unit_suffixes() {
  static const std::vector<std::string> s{"_mm4_per_Ns", "_mm_per_s", "_mpa", "_mm", "_s"};
  return s;
}

[[noreturn]] void unknown_key(const std::string& key) {
  // A known quantity spelled with another (or no) unit gets a precise message.
  for (const auto& def : key_table()) {
    for (const auto& suffix : unit_suffixes()) {
      const auto& n = def.name;
      if (n.size() <= suffix.size() || n.compare(n.size() - suffix.size(), suffix.size(), suffix) != 0) continue;
      const std::string stem = n.substr(0, n.size() - suffix.size());
      if (key == stem || key.rfind(stem + "_", 0) == 0)
        throw ConfigError("unit suffix mismatch for '" + key + "': expected '" + n + "' (unit " + suffix.substr(1) +
                          ")");
      break;
    }
  }
  throw ConfigError("unknown configuration key '" + key + "'");
}

void set_key(SimulationConfig& config, const std::string& key, const std::string& value) {
  const KeyDef* def = find_key(key);
  if (!def) unknown_key(key);
  def->set(config, key, value);
}

void require(const std::set<std::string>& seen, const SimulationConfig& c) {
  auto need = [&](const char* key) {
    if (!seen.count(key)) throw ConfigError(std::string("missing required key '") + key + "'");
  };
  if (!seen.count("mesh.path")) need("mesh.shape");
  need("material.lambda_mpa");
  need("material.mu_mpa");
  need("fluid.permeability_mm4_per_Ns");
  need("time.dt_s");
  if (c.kind == ScenarioKind::unconfined_compression) {
    need("time.rate_mm_per_s");
    need("time.target_strain");
  } else {
    need("time.end_s");
    need("load.traction_mpa");
  }
}

}  // namespace

SimulationConfig parse_config(const std::string& text) {
  SimulationConfig c;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!seen.insert(key).second)
      throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    try {
      set_key(c, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  require(seen, c);
  c.validate();
  return c;
}

SimulationConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config(buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string format_config(const SimulationConfig& config) {
  std::ostringstream out;
  std::string section;
  for (const auto& def : key_table()) {
    const std::string value = def.get(config);
    if (value.empty()) continue;
    const std::string sec = def.name.substr(0, def.name.find('.'));
    if (sec != section) {
      if (!section.empty()) out << '\n';
      out << "# " << sec << '\n';
      section = sec;
    }
    out << def.name << " = " << value << '\n';
  }
  return out.str();
}

void save_config(const SimulationConfig& config, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write config file " + path.string());
  out << format_config(config);
  if (!out) throw IoError("failed writing config file " + path.string());
}

void apply_override(SimulationConfig& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("override '" + assignment + "' is not of the form key=value");
  set_key(config, trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

}  // namespace biphasic
