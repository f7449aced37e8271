#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "biphasic/errors.hpp"
#include "biphasic/mesh.hpp"

namespace biphasic {

namespace {

constexpr const char* kHeader = "biphasic-mesh v1";

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// Line-oriented tokenizer that drops '#' comments and blank lines.
class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  bool next(std::vector<std::string>& tokens) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      std::istringstream ss(line);
      tokens.clear();
      for (std::string t; ss >> t;) tokens.push_back(t);
      if (!tokens.empty()) return true;
    }
    return false;
  }

  std::vector<std::string> require(const char* what) {
    std::vector<std::string> tokens;
    if (!next(tokens)) throw ParseError(std::string("unexpected end of file while reading ") + what, line_no_ + 1);
    return tokens;
  }

  int line() const { return line_no_; }

  template <class T>
  T parse(const std::string& tok, const char* what) const {
    T value{};
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
      throw ParseError(std::string("invalid ") + what + " '" + tok + "'", line_no_);
    return value;
  }

 private:
  std::istream& in_;
  int line_no_ = 0;
};

}  // namespace

void write_mesh(const Mesh& mesh, std::ostream& out) {
  out << kHeader << '\n';
  out << "vertices " << mesh.vertices.size() << '\n';
  for (const auto& v : mesh.vertices)
    out << v.id << ' ' << format_double(v.coords.x()) << ' ' << format_double(v.coords.y()) << ' '
        << format_double(v.coords.z()) << '\n';
  out << "tet10 " << mesh.elements.size() << '\n';
  for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
    out << e;
    for (int n : mesh.elements[e].nodes) out << ' ' << n;
    out << ' ' << mesh.elements[e].region_tag << '\n';
  }
  for (const auto& [name, facets] : mesh.facet_sets) {
    out << "facet_set " << name << ' ' << facets.size() << '\n';
    for (const auto& f : facets) out << f[0] << ' ' << f[1] << ' ' << f[2] << ' ' << f[3] << ' ' << f[4] << ' ' << f[5] << '\n';
  }
  for (const auto& [name, ids] : mesh.node_sets) {
    out << "node_set " << name << ' ' << ids.size() << '\n';
    for (int id : ids) out << id << '\n';
  }
}

void write_mesh(const Mesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  write_mesh(mesh, out);
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

Mesh read_mesh(std::istream& in) {
  Reader r(in);
  Mesh mesh;
  auto header = r.require("header");
  if (header.size() != 2 || header[0] + " " + header[1] != kHeader)
    throw ParseError("expected header '" + std::string(kHeader) + "'", r.line());

  bool have_vertices = false, have_elements = false;
  std::vector<std::string> tok;
  while (r.next(tok)) {
    const std::string& section = tok[0];
    if (section == "vertices") {
      if (tok.size() != 2) throw ParseError("expected 'vertices N'", r.line());
      const auto n = r.parse<std::size_t>(tok[1], "vertex count");
      mesh.vertices.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        auto row = r.require("vertices");
        if (row.size() != 4) throw ParseError("vertex line needs 'id x y z'", r.line());
        auto& v = mesh.vertices[i];
        v.id = r.parse<int>(row[0], "vertex id");
        v.coords = Vec3(r.parse<double>(row[1], "coordinate"), r.parse<double>(row[2], "coordinate"),
                        r.parse<double>(row[3], "coordinate"));
      }
      have_vertices = true;
    } else if (section == "tet10") {
      if (tok.size() != 2) throw ParseError("expected 'tet10 M'", r.line());
      const auto m = r.parse<std::size_t>(tok[1], "element count");
      mesh.elements.resize(m);
      for (std::size_t e = 0; e < m; ++e) {
        auto row = r.require("elements");
        if (row.size() != 12) throw ParseError("element line needs 'id n0..n9 region'", r.line());
        if (r.parse<std::size_t>(row[0], "element id") != e)
          throw ParseError("element ids must be dense and ordered", r.line());
        for (std::size_t k = 0; k < 10; ++k) mesh.elements[e].nodes[k] = r.parse<int>(row[k + 1], "node id");
        mesh.elements[e].region_tag = r.parse<int>(row[11], "region tag");
      }
      have_elements = true;
    } else if (section == "facet_set") {
      if (tok.size() != 3) throw ParseError("expected 'facet_set <name> K'", r.line());
      const auto k = r.parse<std::size_t>(tok[2], "facet count");
      auto& facets = mesh.facet_sets[tok[1]];
      facets.resize(k);
      for (std::size_t f = 0; f < k; ++f) {
        auto row = r.require("facets");
        if (row.size() != 6) throw ParseError("facet line needs 6 node ids", r.line());
        for (std::size_t i = 0; i < 6; ++i) facets[f][i] = r.parse<int>(row[i], "node id");
      }
    } else if (section == "node_set") {
      if (tok.size() != 3) throw ParseError("expected 'node_set <name> K'", r.line());
      const auto k = r.parse<std::size_t>(tok[2], "node count");
      auto& ids = mesh.node_sets[tok[1]];
      while (ids.size() < k) {
        auto row = r.require("node set");
        for (const auto& t : row) ids.push_back(r.parse<int>(t, "node id"));
      }
      if (ids.size() != k) throw ParseError("node set '" + tok[1] + "' has too many ids", r.line());
    } else {
      throw ParseError("unknown section '" + section + "'", r.line());
    }
  }
  if (!have_vertices) throw ParseError("missing 'vertices' section");
  if (!have_elements) throw ParseError("missing 'tet10' section");
  mesh.validate();
  return mesh;
}

Mesh read_mesh(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  return read_mesh(in);
}

}  // namespace biphasic
