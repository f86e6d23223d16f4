#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "zener/common.hpp"

namespace zener {

using EdgeKey = std::pair<int, int>;  // (min vertex, max vertex)

inline EdgeKey edge_key(int a, int b) { return a < b ? EdgeKey{a, b} : EdgeKey{b, a}; }

// Conforming triangulation with a subdomain id (>= 1) per element and
// optional boundary markers (0 = Dirichlet displacement, the default).
struct Mesh {
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> elements;
  std::vector<int> subdomain;
  std::map<EdgeKey, int> boundary_markers;

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_elements() const { return static_cast<int>(elements.size()); }

  double signed_area(int e) const {
    const auto& t = elements[e];
    const Vec2 a = vertices[t[1]] - vertices[t[0]];
    const Vec2 b = vertices[t[2]] - vertices[t[0]];
    return 0.5 * (a[0] * b[1] - a[1] * b[0]);
  }

  // longest edge
  double diameter(int e) const {
    const auto& t = elements[e];
    double h = 0.0;
    for (int i = 0; i < 3; ++i) h = std::max(h, (vertices[t[(i + 1) % 3]] - vertices[t[i]]).norm());
    return h;
  }

  double mesh_size() const {
    double h = 0.0;
    for (int e = 0; e < num_elements(); ++e) h = std::max(h, diameter(e));
    return h;
  }

  std::set<int> subdomain_ids() const { return {subdomain.begin(), subdomain.end()}; }
};

// Local edge e of a triangle is opposite vertex e.
inline std::array<int, 2> local_edge_vertices(int e) {
  static constexpr int tab[3][2] = {{1, 2}, {2, 0}, {0, 1}};
  return {tab[e][0], tab[e][1]};
}

struct InteriorFacet {
  std::array<int, 2> element;     // side 0 supplies the facet normal
  std::array<int, 2> local_edge;
  int v0 = 0, v1 = 0;             // v0 < v1; facet coordinate runs v0 -> v1
  Vec2 normal;                    // outward for element[0]
  double length = 0.0;
};

struct BoundaryFacet {
  int element = 0;
  int local_edge = 0;
  int v0 = 0, v1 = 0;
  Vec2 normal;  // outward
  double length = 0.0;
  int marker = 0;
};

struct FacetTopology {
  std::vector<InteriorFacet> interior;
  std::vector<BoundaryFacet> boundary;
  // per element and local edge: interior facet index, or -1 - boundary index
  std::vector<std::array<int, 3>> element_facets;

  int num_interior() const { return static_cast<int>(interior.size()); }
  int num_boundary() const { return static_cast<int>(boundary.size()); }
};

namespace detail {

inline Vec2 outward_normal(const Mesh& m, int e, int le) {
  const auto lv = local_edge_vertices(le);
  const Vec2 d = m.vertices[m.elements[e][lv[1]]] - m.vertices[m.elements[e][lv[0]]];
  return Vec2(d[1], -d[0]).normalized();
}

// Interiors of two triangles intersect (overlap wider than tol on every axis).
inline bool triangles_overlap(const Mesh& m, int a, int b, double tol) {
  const std::array<int, 2> ids = {a, b};
  for (int s = 0; s < 2; ++s)
    for (int le = 0; le < 3; ++le) {
      const Vec2 n = outward_normal(m, ids[s], le);
      double lo[2] = {1e300, 1e300}, hi[2] = {-1e300, -1e300};
      for (int t = 0; t < 2; ++t)
        for (int v : m.elements[ids[t]]) {
          const double p = n.dot(m.vertices[v]);
          lo[t] = std::min(lo[t], p);
          hi[t] = std::max(hi[t], p);
        }
      if (std::min(hi[0], hi[1]) - std::max(lo[0], lo[1]) <= tol) return false;
    }
  return true;
}

}  // namespace detail

inline FacetTopology build_facets(const Mesh& mesh) {
  std::map<EdgeKey, std::vector<std::pair<int, int>>> owners;
  for (int e = 0; e < mesh.num_elements(); ++e)
    for (int le = 0; le < 3; ++le) {
      const auto lv = local_edge_vertices(le);
      owners[edge_key(mesh.elements[e][lv[0]], mesh.elements[e][lv[1]])].push_back({e, le});
    }
  FacetTopology ft;
  ft.element_facets.assign(mesh.num_elements(), {0, 0, 0});
  for (const auto& [key, own] : owners) {
    const double len = (mesh.vertices[key.second] - mesh.vertices[key.first]).norm();
    if (own.size() == 2) {
      InteriorFacet f;
      f.element = {own[0].first, own[1].first};
      f.local_edge = {own[0].second, own[1].second};
      f.v0 = key.first;
      f.v1 = key.second;
      f.normal = detail::outward_normal(mesh, own[0].first, own[0].second);
      f.length = len;
      ft.element_facets[own[0].first][own[0].second] = ft.num_interior();
      ft.element_facets[own[1].first][own[1].second] = ft.num_interior();
      ft.interior.push_back(f);
    } else if (own.size() == 1) {
      BoundaryFacet f;
      f.element = own[0].first;
      f.local_edge = own[0].second;
      f.v0 = key.first;
      f.v1 = key.second;
      f.normal = detail::outward_normal(mesh, own[0].first, own[0].second);
      f.length = len;
      auto it = mesh.boundary_markers.find(key);
      f.marker = it == mesh.boundary_markers.end() ? 0 : it->second;
      ft.element_facets[own[0].first][own[0].second] = -1 - ft.num_boundary();
      ft.boundary.push_back(f);
    } else {
      throw TopologyError("edge (" + std::to_string(key.first) + ", " + std::to_string(key.second) +
                          ") is shared by " + std::to_string(own.size()) + " elements");
    }
  }
  return ft;
}

// Throws TopologyError for inverted/degenerate elements, edges shared by
// more than two elements, hanging nodes and overlapping elements; throws
// ParseError for bad indices or subdomain ids.
inline void validate_mesh(const Mesh& mesh) {
  const int nv = mesh.num_vertices();
  if (nv < 3 || mesh.num_elements() < 1) throw ParseError("mesh has no elements");
  if (static_cast<int>(mesh.subdomain.size()) != mesh.num_elements())
    throw ParseError("subdomain list does not match element count");
  double xmin = 1e300, xmax = -1e300;
  for (const auto& v : mesh.vertices) {
    if (!std::isfinite(v[0]) || !std::isfinite(v[1])) throw ParseError("non-finite vertex coordinate");
    xmin = std::min({xmin, v[0], v[1]});
    xmax = std::max({xmax, v[0], v[1]});
  }
  const double scale = std::max(xmax - xmin, 1e-300);
  for (int e = 0; e < mesh.num_elements(); ++e) {
    for (int v : mesh.elements[e])
      if (v < 0 || v >= nv)
        throw ParseError("element " + std::to_string(e) + " references vertex " + std::to_string(v));
    if (mesh.subdomain[e] < 1)
      throw ParseError("element " + std::to_string(e) + " has subdomain id " +
                       std::to_string(mesh.subdomain[e]) + " (ids start at 1)");
    const double a = mesh.signed_area(e);
    if (a <= 1e-14 * scale * scale)
      throw TopologyError("element " + std::to_string(e) + (a < 0 ? " is inverted" : " is degenerate"));
  }
  const FacetTopology ft = build_facets(mesh);

  // hanging nodes: a vertex lying inside a boundary-type edge
  for (const auto& f : ft.boundary) {
    const Vec2 a = mesh.vertices[f.v0], b = mesh.vertices[f.v1];
    const Vec2 d = b - a;
    const double len2 = d.squaredNorm();
    for (int v = 0; v < nv; ++v) {
      if (v == f.v0 || v == f.v1) continue;
      const Vec2 p = mesh.vertices[v] - a;
      const double s = p.dot(d) / len2;
      if (s <= 1e-12 || s >= 1.0 - 1e-12) continue;
      const double dist = std::abs(p[0] * d[1] - p[1] * d[0]) / std::sqrt(len2);
      if (dist < 1e-10 * std::sqrt(len2))
        throw TopologyError("hanging node: vertex " + std::to_string(v) + " lies on edge (" +
                            std::to_string(f.v0) + ", " + std::to_string(f.v1) + ")");
    }
  }

  // overlap: separating-axis test on element pairs that share a grid bin
  {
    const int ne = mesh.num_elements();
    const int nb = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(ne))));
    std::vector<std::array<double, 4>> box(ne);
    for (int e = 0; e < ne; ++e) {
      box[e] = {1e300, 1e300, -1e300, -1e300};
      for (int v : mesh.elements[e]) {
        const Vec2& p = mesh.vertices[v];
        box[e][0] = std::min(box[e][0], p[0]);
        box[e][1] = std::min(box[e][1], p[1]);
        box[e][2] = std::max(box[e][2], p[0]);
        box[e][3] = std::max(box[e][3], p[1]);
      }
    }
    auto bin = [&](double x) { return std::clamp(static_cast<int>((x - xmin) / scale * nb), 0, nb - 1); };
    std::vector<std::vector<int>> bins(nb * nb);
    for (int e = 0; e < ne; ++e)
      for (int i = bin(box[e][0]); i <= bin(box[e][2]); ++i)
        for (int j = bin(box[e][1]); j <= bin(box[e][3]); ++j) bins[i * nb + j].push_back(e);
    std::set<std::pair<int, int>> tested;
    for (const auto& b : bins)
      for (std::size_t x = 0; x < b.size(); ++x)
        for (std::size_t y = x + 1; y < b.size(); ++y) {
          const int e0 = std::min(b[x], b[y]), e1 = std::max(b[x], b[y]);
          if (!tested.insert({e0, e1}).second) continue;
          if (detail::triangles_overlap(mesh, e0, e1, 1e-10 * scale))
            throw TopologyError("elements " + std::to_string(e0) + " and " + std::to_string(e1) + " overlap");
        }
  }

  for (const auto& [key, marker] : mesh.boundary_markers) {
    bool found = false;
    for (const auto& f : ft.boundary)
      if (f.v0 == key.first && f.v1 == key.second) found = true;
    if (!found)
      throw TopologyError("boundary marker given for edge (" + std::to_string(key.first) + ", " +
                          std::to_string(key.second) + ") which is not a boundary edge");
    if (marker < 0) throw ParseError("negative boundary marker");
  }
}

// Native ASCII format (0-based indices, '#' starts a comment):
//   nv ne
//   x y                        (nv lines)
//   v0 v1 v2 subdomain_id      (ne lines)
//   ev0 ev1 marker             (optional, any number of boundary edges)
inline Mesh read_mesh(std::istream& in, const std::string& name = "<stream>") {
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) tokens.push_back(tok);
  }
  std::size_t pos = 0;
  auto next_double = [&](const char* what) {
    if (pos >= tokens.size()) throw ParseError(name + ": unexpected end of file reading " + what);
    const std::string& t = tokens[pos++];
    try {
      std::size_t used = 0;
      const double v = std::stod(t, &used);
      if (used != t.size()) throw std::invalid_argument(t);
      return v;
    } catch (const std::exception&) {
      throw ParseError(name + ": expected a number for " + what + ", got '" + t + "'");
    }
  };
  auto next_int = [&](const char* what) {
    const double v = next_double(what);
    if (v != std::floor(v) || std::abs(v) > 2e9) throw ParseError(name + ": expected an integer for " + what);
    return static_cast<int>(v);
  };
  Mesh m;
  const int nv = next_int("vertex count");
  const int ne = next_int("element count");
  if (nv < 3 || ne < 1) throw ParseError(name + ": need at least 3 vertices and 1 element");
  m.vertices.resize(nv);
  for (int i = 0; i < nv; ++i) {
    m.vertices[i][0] = next_double("vertex x");
    m.vertices[i][1] = next_double("vertex y");
  }
  m.elements.resize(ne);
  m.subdomain.resize(ne);
  for (int e = 0; e < ne; ++e) {
    for (int a = 0; a < 3; ++a) m.elements[e][a] = next_int("element vertex");
    m.subdomain[e] = next_int("subdomain id");
  }
  const std::size_t rest = tokens.size() - pos;
  if (rest % 3 != 0) throw ParseError(name + ": trailing boundary section must be triples 'v0 v1 marker'");
  while (pos < tokens.size()) {
    const int a = next_int("edge vertex"), b = next_int("edge vertex");
    const int marker = next_int("boundary marker");
    if (a < 0 || a >= nv || b < 0 || b >= nv) throw ParseError(name + ": boundary edge vertex out of range");
    m.boundary_markers[edge_key(a, b)] = marker;
  }
  validate_mesh(m);
  return m;
}

inline Mesh load_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open mesh file '" + path + "'");
  return read_mesh(in, path);
}

inline void write_mesh(std::ostream& out, const Mesh& m) {
  out.precision(17);
  out << m.num_vertices() << ' ' << m.num_elements() << '\n';
  for (const auto& v : m.vertices) out << v[0] << ' ' << v[1] << '\n';
  for (int e = 0; e < m.num_elements(); ++e)
    out << m.elements[e][0] << ' ' << m.elements[e][1] << ' ' << m.elements[e][2] << ' ' << m.subdomain[e]
        << '\n';
  for (const auto& [key, marker] : m.boundary_markers) out << key.first << ' ' << key.second << ' ' << marker << '\n';
}

// Gmsh 2.2 ASCII.  Triangles (type 2) carry the subdomain in their first
// tag, lines (type 1) carry a boundary marker.  Clockwise triangles are flipped.
inline Mesh load_gmsh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open gmsh file '" + path + "'");
  Mesh m;
  std::map<long, int> node_index;
  std::vector<std::array<long, 3>> lines;
  std::string section;
  while (in >> section) {
    if (section == "$MeshFormat") {
      double version;
      int type, size;
      in >> version >> type >> size;
      if (!in || version < 2.0 || version >= 3.0 || type != 0)
        throw ParseError(path + ": only ASCII gmsh format 2.x is supported");
    } else if (section == "$Nodes") {
      long n;
      in >> n;
      for (long i = 0; i < n; ++i) {
        long id;
        double x, y, z;
        if (!(in >> id >> x >> y >> z)) throw ParseError(path + ": bad $Nodes entry");
        node_index[id] = m.num_vertices();
        m.vertices.emplace_back(x, y);
      }
    } else if (section == "$Elements") {
      long n;
      in >> n;
      for (long i = 0; i < n; ++i) {
        long id;
        int type, ntags;
        if (!(in >> id >> type >> ntags)) throw ParseError(path + ": bad $Elements entry");
        std::vector<long> tags(ntags);
        for (auto& t : tags) in >> t;
        const int nn = type == 1 ? 2 : type == 2 ? 3 : type == 15 ? 1 : -1;
        if (nn < 0) throw ParseError(path + ": unsupported gmsh element type " + std::to_string(type));
        std::array<long, 3> nodes{};
        for (int a = 0; a < nn; ++a) in >> nodes[a];
        if (!in) throw ParseError(path + ": truncated element record");
        const long tag = ntags > 0 ? tags[0] : 1;
        auto idx = [&](long node) {
          auto it = node_index.find(node);
          if (it == node_index.end()) throw ParseError(path + ": unknown node " + std::to_string(node));
          return it->second;
        };
        if (type == 2) {
          m.elements.push_back({idx(nodes[0]), idx(nodes[1]), idx(nodes[2])});
          m.subdomain.push_back(static_cast<int>(tag));
          if (m.signed_area(m.num_elements() - 1) < 0) std::swap(m.elements.back()[1], m.elements.back()[2]);
        } else if (type == 1) {
          lines.push_back({idx(nodes[0]), idx(nodes[1]), tag});
        }
      }
    }
  }
  if (m.elements.empty()) throw ParseError(path + ": no triangles found");
  const FacetTopology ft = build_facets(m);
  std::set<EdgeKey> bnd;
  for (const auto& f : ft.boundary) bnd.insert({f.v0, f.v1});
  for (const auto& l : lines) {
    const EdgeKey k = edge_key(static_cast<int>(l[0]), static_cast<int>(l[1]));
    if (bnd.count(k) && l[2] != 0) m.boundary_markers[k] = static_cast<int>(l[2]);
  }
  validate_mesh(m);
  return m;
}

// Uniform n x n mesh of [x0, x1] x [y0, y1], every square cut along its
// rising diagonal.  With `interface_x` inside (x0, x1) elements left of it
// get subdomain 1 and the rest 2; otherwise everything is subdomain 1.
inline Mesh unit_square(int n, double interface_x = 0.5, double x0 = 0.0, double x1 = 1.0, double y0 = 0.0,
                        double y1 = 1.0) {
  if (n < 1) throw std::invalid_argument("unit_square: n must be positive");
  Mesh m;
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) m.vertices.emplace_back(x0 + (x1 - x0) * i / n, y0 + (y1 - y0) * j / n);
  auto id = [n](int i, int j) { return j * (n + 1) + i; };
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      m.elements.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      m.elements.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  const bool split = interface_x > x0 && interface_x < x1;
  for (int e = 0; e < m.num_elements(); ++e) {
    const auto& t = m.elements[e];
    const double cx = (m.vertices[t[0]][0] + m.vertices[t[1]][0] + m.vertices[t[2]][0]) / 3.0;
    m.subdomain.push_back(split && cx > interface_x ? 2 : 1);
  }
  return m;
}

// Red refinement: each triangle splits into four.  Subdomain ids and
// boundary markers are inherited.
inline Mesh refine_uniform(const Mesh& mesh) {
  Mesh r;
  r.vertices = mesh.vertices;
  std::map<EdgeKey, int> midpoint;
  auto mid = [&](int a, int b) {
    const EdgeKey k = edge_key(a, b);
    auto it = midpoint.find(k);
    if (it != midpoint.end()) return it->second;
    const int id = r.num_vertices();
    r.vertices.push_back(0.5 * (mesh.vertices[a] + mesh.vertices[b]));
    midpoint[k] = id;
    return id;
  };
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const auto [a, b, c] = mesh.elements[e];
    const int ab = mid(a, b), bc = mid(b, c), ca = mid(c, a);
    for (const auto& t : {std::array<int, 3>{a, ab, ca}, std::array<int, 3>{ab, b, bc},
                          std::array<int, 3>{ca, bc, c}, std::array<int, 3>{ab, bc, ca}}) {
      r.elements.push_back(t);
      r.subdomain.push_back(mesh.subdomain[e]);
    }
  }
  for (const auto& [key, marker] : mesh.boundary_markers) {
    const int m = midpoint.at(key);
    r.boundary_markers[edge_key(key.first, m)] = marker;
    r.boundary_markers[edge_key(m, key.second)] = marker;
  }
  return r;
}

}  // namespace zener
