#include "sie/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace sie::geo {

double norm(Vec2 a) { return std::hypot(a.x, a.y); }

namespace {

constexpr double kTwoPi = 2.0 * kPi;

std::string fmt(const char* pattern, ...) {
  char buf[256];
  va_list args;
  va_start(args, pattern);
  std::vsnprintf(buf, sizeof buf, pattern, args);
  va_end(args);
  return buf;
}

double wrap_angle(double t) {
  t = std::fmod(t, kTwoPi);
  if (t < 0) t += kTwoPi;
  return t;
}

std::pair<int, int> ukey(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

}  // namespace

void validate_spec(const GeometrySpec& spec) {
  const double R = spec.truncation_radius;
  if (!(R > 0.0) || !std::isfinite(R))
    throw ConfigError("geometry: truncation radius must be a positive number");
  double prev = 0.0;
  for (double r : spec.interface_radii) {
    if (!(r > prev))
      throw ConfigError(fmt("geometry: interface radii must be strictly increasing and "
                            "positive; offending radius %.17g", r));
    if (!(r < R))
      throw ConfigError(fmt("geometry: interface radius %.17g must lie strictly inside the "
                            "truncation radius %.17g", r, R));
    prev = r;
  }
  if (spec.obstacle) {
    const Obstacle& obs = *spec.obstacle;
    double rmax = spec.interface_radii.empty() ? R : spec.interface_radii.front();
    if (!(obs.radius > 0.0) || !(obs.radius < rmax))
      throw ConfigError(fmt("geometry: obstacle radius %.17g must lie in (0, %.17g)",
                            obs.radius, rmax));
    if (obs.arcs.empty()) throw ConfigError("geometry: obstacle needs at least one boundary arc");
    std::vector<BoundaryArc> arcs = obs.arcs;
    for (auto& a : arcs) {
      if (a.tag != EdgeTag::Dirichlet && a.tag != EdgeTag::Neumann)
        throw ConfigError("geometry: obstacle arcs must be tagged DIRICHLET or NEUMANN");
      double len = a.theta1 - a.theta0;
      if (!(len > 0.0) || len > kTwoPi + 1e-12)
        throw ConfigError("geometry: obstacle arc must have positive length at most 2*pi");
      a.theta0 = wrap_angle(a.theta0);
      a.theta1 = a.theta0 + len;
    }
    std::sort(arcs.begin(), arcs.end(),
              [](const BoundaryArc& x, const BoundaryArc& y) { return x.theta0 < y.theta0; });
    double total = 0.0;
    for (size_t i = 0; i < arcs.size(); ++i) {
      total += arcs[i].theta1 - arcs[i].theta0;
      double next_start = (i + 1 < arcs.size()) ? arcs[i + 1].theta0 : arcs[0].theta0 + kTwoPi;
      if (std::abs(arcs[i].theta1 - next_start) > 1e-10)
        throw ConfigError(fmt("geometry: obstacle arcs must partition the circle; gap or "
                              "overlap near angle %.17g", arcs[i].theta1));
    }
    if (std::abs(total - kTwoPi) > 1e-9)
      throw ConfigError("geometry: obstacle arcs must cover the full circle exactly once");
  }
}

namespace {

struct Ring {
  double r = 0.0;
  int role = 0;  // 0 plain, 1 outer, 2 interface, 3 obstacle
  int iface = -1;
  std::vector<int> nodes;
  std::vector<double> angles;  // ascending in [0, 2*pi)
};

int add_vertex(Mesh& m, double x, double y) {
  m.vertices.push_back({x, y});
  return static_cast<int>(m.vertices.size()) - 1;
}

void uniform_ring(Mesh& m, Ring& ring, double target_h) {
  int n = std::max<int>(8, 2 * (int)std::llround(kPi * ring.r / target_h));
  ring.nodes.reserve(n);
  ring.angles.reserve(n);
  // Second half of the ring by exact negation: the mesh is then symmetric
  // under rotation by pi to the last bit, which downstream reciprocity
  // checks rely on.
  for (int k = 0; k < n; ++k) {
    double t = kTwoPi * k / n;
    if (k < n / 2) {
      ring.nodes.push_back(add_vertex(m, ring.r * std::cos(t), ring.r * std::sin(t)));
    } else {
      const Vec2& p = m.vertices[ring.nodes[k - n / 2]];
      ring.nodes.push_back(add_vertex(m, -p.x, -p.y));
    }
    ring.angles.push_back(t);
  }
}

void obstacle_ring(Mesh& m, Ring& ring, const Obstacle& obs, double target_h) {
  std::vector<BoundaryArc> arcs = obs.arcs;
  for (auto& a : arcs) {
    double len = a.theta1 - a.theta0;
    a.theta0 = wrap_angle(a.theta0);
    a.theta1 = a.theta0 + len;
  }
  std::sort(arcs.begin(), arcs.end(),
            [](const BoundaryArc& x, const BoundaryArc& y) { return x.theta0 < y.theta0; });
  std::vector<double> angles;
  for (const auto& a : arcs) {
    double len = a.theta1 - a.theta0;
    int segs = std::max<int>({1, (int)std::ceil(len * obs.radius / target_h),
                              (int)std::ceil(len / (kPi / 4.0))});
    for (int i = 0; i < segs; ++i) angles.push_back(wrap_angle(a.theta0 + len * i / segs));
  }
  std::sort(angles.begin(), angles.end());
  ring.angles = angles;
  for (double t : angles)
    ring.nodes.push_back(add_vertex(m, ring.r * std::cos(t), ring.r * std::sin(t)));
}

// Triangulate the annular strip between two concentric node rings by an
// angular merge sweep (two-pointer walk over the sorted angles).
void zip_rings(Mesh& m, const Ring& in, const Ring& out, int region) {
  const size_t na = in.nodes.size(), nb = out.nodes.size();
  size_t ia = 0, ib = 0;
  auto ang = [](const Ring& r, size_t i) {
    return r.angles[i % r.angles.size()] + kTwoPi * (double)(i / r.angles.size());
  };
  while (ia < na || ib < nb) {
    bool advance_outer;
    if (ib == nb)
      advance_outer = false;
    else if (ia == na)
      advance_outer = true;
    else  // ties (to rounding) advance the inner ring: the wedge then closes
          // with a short radial edge instead of a diagonal spanning a full
          // inner spacing
      advance_outer = ang(out, ib + 1) < ang(in, ia + 1) - 1e-12;
    if (advance_outer) {
      m.triangles.push_back(
          {{in.nodes[ia % na], out.nodes[ib % nb], out.nodes[(ib + 1) % nb]}, region});
      ++ib;
    } else {
      m.triangles.push_back(
          {{in.nodes[ia % na], out.nodes[ib % nb], in.nodes[(ia + 1) % na]}, region});
      ++ia;
    }
  }
}

double edge_len(const Mesh& m, int a, int b) { return norm(m.vertices[a] - m.vertices[b]); }

double max_edge_length(const Mesh& m) {
  double h = 0.0;
  for (const auto& t : m.triangles)
    for (int e = 0; e < 3; ++e) h = std::max(h, edge_len(m, t.v[e], t.v[(e + 1) % 3]));
  return h;
}

}  // namespace

double tri_area(const Mesh& m, int t) {
  const auto& tr = m.triangles[t];
  Vec2 a = m.vertices[tr.v[0]], b = m.vertices[tr.v[1]], c = m.vertices[tr.v[2]];
  return 0.5 * cross(b - a, c - a);
}

Mesh build_concentric_mesh(const GeometrySpec& spec, double target_h) {
  validate_spec(spec);
  const double R = spec.truncation_radius;
  if (!(target_h > 0.0) || !(target_h <= R / 4.0))
    throw ConfigError("build_concentric_mesh: target_h must lie in (0, R/4]");

  struct Anchor {
    double r;
    int role;
    int iface;
  };
  std::vector<Anchor> anchors;
  if (spec.obstacle)
    anchors.push_back({spec.obstacle->radius, 3, -1});
  else
    anchors.push_back({0.0, 0, -1});
  for (size_t j = 0; j < spec.interface_radii.size(); ++j)
    anchors.push_back({spec.interface_radii[j], 2, (int)j});
  anchors.push_back({R, 1, -1});

  for (size_t i = 0; i + 1 < anchors.size(); ++i) {
    double gap = anchors[i + 1].r - anchors[i].r;
    if (gap < 2.0 * target_h)
      throw ConfigError(fmt("build_concentric_mesh: annulus between radii %.17g and %.17g is "
                            "too thin for target_h=%.17g (needs gap >= 2*target_h)",
                            anchors[i].r, anchors[i + 1].r, target_h));
  }

  Mesh mesh;
  mesh.num_regions = spec.num_regions();

  std::vector<Ring> rings;
  if (spec.obstacle) {
    Ring ring;
    ring.r = spec.obstacle->radius;
    ring.role = 3;
    obstacle_ring(mesh, ring, *spec.obstacle, target_h);
    rings.push_back(std::move(ring));
  }
  for (size_t i = 0; i + 1 < anchors.size(); ++i) {
    double ra = anchors[i].r, rb = anchors[i + 1].r;
    int n = std::max<int>(1, (int)std::ceil((rb - ra) / target_h));
    for (int k = 1; k <= n; ++k) {
      Ring ring;
      ring.r = ra + (rb - ra) * k / n;
      ring.role = (k == n) ? anchors[i + 1].role : 0;
      ring.iface = (k == n) ? anchors[i + 1].iface : -1;
      uniform_ring(mesh, ring, target_h);
      rings.push_back(std::move(ring));
    }
  }

  auto region_of = [&](double r) {
    int cnt = 0;
    for (double ri : spec.interface_radii)
      if (ri > r) ++cnt;
    return cnt;
  };

  if (!spec.obstacle) {
    int center = add_vertex(mesh, 0.0, 0.0);
    const Ring& r0 = rings[0];
    int region = region_of(0.5 * r0.r);
    int n = (int)r0.nodes.size();
    for (int k = 0; k < n; ++k)
      mesh.triangles.push_back({{center, r0.nodes[k], r0.nodes[(k + 1) % n]}, region});
  }
  for (size_t i = 0; i + 1 < rings.size(); ++i) {
    int region = region_of(0.5 * (rings[i].r + rings[i + 1].r));
    zip_rings(mesh, rings[i], rings[i + 1], region);
  }

  for (const Ring& ring : rings) {
    int n = (int)ring.nodes.size();
    if (ring.role == 1 || ring.role == 2) {
      for (int k = 0; k < n; ++k) {
        BEdge e;
        e.a = ring.nodes[k];
        e.b = ring.nodes[(k + 1) % n];
        e.tag = (ring.role == 1) ? EdgeTag::Outer : EdgeTag::Interface;
        e.iface = ring.iface;
        mesh.boundary_edges.push_back(e);
      }
    } else if (ring.role == 3) {
      // Arc tag chosen by the midpoint angle of each edge; arc endpoints are
      // ring nodes, so an edge never straddles two arcs.
      std::vector<BoundaryArc> arcs = spec.obstacle->arcs;
      for (auto& a : arcs) {
        double len = a.theta1 - a.theta0;
        a.theta0 = wrap_angle(a.theta0);
        a.theta1 = a.theta0 + len;
      }
      for (int k = 0; k < n; ++k) {
        double t0 = ring.angles[k];
        double t1 = (k + 1 < n) ? ring.angles[k + 1] : ring.angles[0] + kTwoPi;
        double mid = wrap_angle(0.5 * (t0 + t1));
        EdgeTag tag = EdgeTag::Dirichlet;
        for (const auto& a : arcs) {
          if ((mid >= a.theta0 && mid < a.theta1) ||
              (mid + kTwoPi >= a.theta0 && mid + kTwoPi < a.theta1)) {
            tag = a.tag;
            break;
          }
        }
        mesh.boundary_edges.push_back({ring.nodes[k], ring.nodes[(k + 1) % n], tag, -1});
      }
    }
  }

  mesh.h = max_edge_length(mesh);
  check_mesh(mesh);
  return mesh;
}

Mesh refine(const Mesh& in) {
  Mesh out;
  out.vertices = in.vertices;
  out.num_regions = in.num_regions;

  // Snapping radii for midpoints of tagged (circle) edges.
  std::map<std::pair<int, int>, double> snap;
  for (const auto& e : in.boundary_edges)
    snap[ukey(e.a, e.b)] = 0.5 * (norm(in.vertices[e.a]) + norm(in.vertices[e.b]));

  std::map<std::pair<int, int>, int> mid;
  auto midpoint = [&](int a, int b) {
    auto key = ukey(a, b);
    auto it = mid.find(key);
    if (it != mid.end()) return it->second;
    Vec2 p = 0.5 * (in.vertices[a] + in.vertices[b]);
    auto sit = snap.find(key);
    if (sit != snap.end()) {
      double r = norm(p);
      if (r > 0) p = (sit->second / r) * p;
    }
    int id = add_vertex(out, p.x, p.y);
    mid.emplace(key, id);
    return id;
  };

  for (const auto& t : in.triangles) {
    int m01 = midpoint(t.v[0], t.v[1]);
    int m12 = midpoint(t.v[1], t.v[2]);
    int m20 = midpoint(t.v[2], t.v[0]);
    out.triangles.push_back({{t.v[0], m01, m20}, t.region});
    out.triangles.push_back({{m01, t.v[1], m12}, t.region});
    out.triangles.push_back({{m20, m12, t.v[2]}, t.region});
    out.triangles.push_back({{m01, m12, m20}, t.region});
  }
  for (const auto& e : in.boundary_edges) {
    int m = midpoint(e.a, e.b);
    out.boundary_edges.push_back({e.a, m, e.tag, e.iface});
    out.boundary_edges.push_back({m, e.b, e.tag, e.iface});
  }
  out.h = max_edge_length(out);
  return out;
}

namespace {

// Ordered walk of a closed edge loop; counterclockwise, starting at the
// smallest node id.
std::vector<int> walk_loop(const Mesh& m, const std::vector<std::pair<int, int>>& edges,
                           const std::string& what) {
  if (edges.empty()) throw NumericError(what + ": no edges with this tag");
  std::map<int, std::vector<int>> nbr;
  for (auto [a, b] : edges) {
    nbr[a].push_back(b);
    nbr[b].push_back(a);
  }
  for (const auto& [v, ns] : nbr)
    if (ns.size() != 2)
      throw NumericError(what + ": polyline is open or branches at node " + std::to_string(v));
  int start = nbr.begin()->first;
  std::vector<int> loop{start};
  int prev = -1, cur = start;
  while (true) {
    const auto& ns = nbr[cur];
    int nxt = (ns[0] == prev) ? ns[1] : ns[0];
    if (nxt == start) break;
    loop.push_back(nxt);
    prev = cur;
    cur = nxt;
    if (loop.size() > edges.size()) throw NumericError(what + ": polyline does not close");
  }
  if (loop.size() != edges.size())
    throw NumericError(what + ": edges form more than one loop");
  double area2 = 0.0;
  for (size_t i = 0; i < loop.size(); ++i)
    area2 += cross(m.vertices[loop[i]], m.vertices[loop[(i + 1) % loop.size()]]);
  if (area2 < 0) {
    std::reverse(loop.begin() + 1, loop.end());  // keep the same start node
  }
  return loop;
}

}  // namespace

std::vector<int> interface_loop(const Mesh& m, int iface) {
  std::vector<std::pair<int, int>> edges;
  for (const auto& e : m.boundary_edges)
    if (e.tag == EdgeTag::Interface && e.iface == iface) edges.push_back({e.a, e.b});
  return walk_loop(m, edges, "interface " + std::to_string(iface));
}

std::vector<int> outer_loop(const Mesh& m) {
  std::vector<std::pair<int, int>> edges;
  for (const auto& e : m.boundary_edges)
    if (e.tag == EdgeTag::Outer) edges.push_back({e.a, e.b});
  return walk_loop(m, edges, "outer boundary");
}

std::vector<int> obstacle_loop(const Mesh& m) {
  std::vector<std::pair<int, int>> edges;
  for (const auto& e : m.boundary_edges)
    if (e.tag == EdgeTag::Dirichlet || e.tag == EdgeTag::Neumann) edges.push_back({e.a, e.b});
  if (edges.empty()) return {};
  return walk_loop(m, edges, "obstacle boundary");
}

namespace {

// True when the triangle with vertex v (a loop node) lies inside the closed
// counterclockwise loop.  The interior is on the left of the directed loop;
// at v the inside sector runs counterclockwise from direction (v->next) to
// direction (v->prev).
bool tri_inside_loop(const Mesh& m, const Tri& t, int v, int vprev, int vnext) {
  Vec2 p = m.vertices[v];
  Vec2 centroid = (1.0 / 3.0) * (m.vertices[t.v[0]] + m.vertices[t.v[1]] + m.vertices[t.v[2]]);
  double a = std::atan2(m.vertices[vnext].y - p.y, m.vertices[vnext].x - p.x);
  double b = std::atan2(m.vertices[vprev].y - p.y, m.vertices[vprev].x - p.x);
  double c = std::atan2(centroid.y - p.y, centroid.x - p.x);
  double span = wrap_angle(b - a);
  double off = wrap_angle(c - a);
  return off < span;
}

}  // namespace

CrackMesh make_crack_mesh(const Mesh& in, int iface) {
  std::vector<int> loop = interface_loop(in, iface);
  const size_t n = loop.size();

  CrackMesh crack;
  crack.iface = iface;
  crack.mesh = in;
  Mesh& m = crack.mesh;

  std::map<int, int> dup;       // original -> exterior copy
  std::map<int, size_t> where;  // original -> loop position
  for (size_t i = 0; i < n; ++i) {
    int v = loop[i];
    where[v] = i;
    int d = add_vertex(m, in.vertices[v].x, in.vertices[v].y);
    dup[v] = d;
    crack.pairs.push_back({v, d});
  }

  for (auto& t : m.triangles) {
    int lv = -1;
    for (int k = 0; k < 3; ++k)
      if (where.count(t.v[k])) {
        lv = t.v[k];
        break;
      }
    if (lv < 0) continue;
    size_t i = where[lv];
    int vprev = loop[(i + n - 1) % n], vnext = loop[(i + 1) % n];
    if (!tri_inside_loop(in, t, lv, vprev, vnext)) {
      for (int k = 0; k < 3; ++k) {
        auto it = dup.find(t.v[k]);
        if (it != dup.end()) t.v[k] = it->second;
      }
    }
  }
  return crack;
}

Mesh collapse(const CrackMesh& crack) {
  Mesh out = crack.mesh;
  std::map<int, int> back;
  for (auto [orig, copy] : crack.pairs) back[copy] = orig;
  for (auto& t : out.triangles)
    for (int k = 0; k < 3; ++k) {
      auto it = back.find(t.v[k]);
      if (it != back.end()) t.v[k] = it->second;
    }
  out.vertices.resize(out.vertices.size() - crack.pairs.size());
  return out;
}

void save_mesh(const Mesh& m, std::ostream& out) {
  out << "siemesh 1\n";
  char buf[128];
  for (const auto& v : m.vertices) {
    std::snprintf(buf, sizeof buf, "v %.17g %.17g\n", v.x, v.y);
    out << buf;
  }
  for (const auto& t : m.triangles) {
    std::snprintf(buf, sizeof buf, "t %d %d %d %d\n", t.v[0], t.v[1], t.v[2], t.region);
    out << buf;
  }
  for (const auto& e : m.boundary_edges) {
    std::string tag;
    switch (e.tag) {
      case EdgeTag::Outer: tag = "OUTER"; break;
      case EdgeTag::Dirichlet: tag = "DIR"; break;
      case EdgeTag::Neumann: tag = "NEU"; break;
      case EdgeTag::Interface: tag = "IFACE:" + std::to_string(e.iface); break;
    }
    std::snprintf(buf, sizeof buf, "e %d %d %s\n", e.a, e.b, tag.c_str());
    out << buf;
  }
}

Mesh load_mesh(std::istream& in) {
  Mesh m;
  std::string line;
  long lineno = 0;
  bool have_header = false;
  int max_region = 0;

  auto fail = [&](const std::string& what) {
    throw ConfigError(fmt("mesh line %ld: %s", lineno, what.c_str()));
  };

  while (std::getline(in, line)) {
    ++lineno;
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string kind;
    ls >> kind;
    if (!have_header) {
      std::string version;
      if (kind != "siemesh" || !(ls >> version))
        fail("expected header 'siemesh 1'");
      if (version != "1")
        fail("unsupported mesh format version '" + version + "'; this build reads version 1");
      have_header = true;
      continue;
    }
    if (kind == "v") {
      double x, y;
      if (!(ls >> x >> y)) fail("malformed vertex line");
      m.vertices.push_back({x, y});
    } else if (kind == "t") {
      Tri t;
      if (!(ls >> t.v[0] >> t.v[1] >> t.v[2] >> t.region)) fail("malformed triangle line");
      if (t.region < 0) fail("negative region id");
      max_region = std::max(max_region, t.region);
      m.triangles.push_back(t);
    } else if (kind == "e") {
      BEdge e;
      std::string tag;
      if (!(ls >> e.a >> e.b >> tag)) fail("malformed edge line");
      if (tag == "OUTER")
        e.tag = EdgeTag::Outer;
      else if (tag == "DIR")
        e.tag = EdgeTag::Dirichlet;
      else if (tag == "NEU")
        e.tag = EdgeTag::Neumann;
      else if (tag.rfind("IFACE:", 0) == 0) {
        e.tag = EdgeTag::Interface;
        try {
          e.iface = std::stoi(tag.substr(6));
        } catch (...) {
          fail("unknown edge tag '" + tag + "'");
        }
      } else
        fail("unknown edge tag '" + tag + "'");
      m.boundary_edges.push_back(e);
    } else {
      fail("unknown record '" + kind + "'");
    }
  }
  if (!have_header) throw ConfigError("mesh: empty input, expected header 'siemesh 1'");

  const int nv = (int)m.vertices.size();
  lineno = -1;  // range errors below are not tied to one line
  for (const auto& t : m.triangles)
    for (int k = 0; k < 3; ++k)
      if (t.v[k] < 0 || t.v[k] >= nv)
        throw ConfigError(fmt("mesh: vertex index out of range (%d, have %d vertices)",
                              t.v[k], nv));
  for (const auto& e : m.boundary_edges)
    if (e.a < 0 || e.a >= nv || e.b < 0 || e.b >= nv)
      throw ConfigError(fmt("mesh: vertex index out of range (edge %d-%d, have %d vertices)",
                            e.a, e.b, nv));
  m.num_regions = max_region + 1;
  m.h = max_edge_length(m);
  return m;
}

void save_mesh_file(const Mesh& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open mesh file for writing: " + path);
  save_mesh(m, out);
  if (!out.good()) throw ConfigError("failed while writing mesh file: " + path);
}

Mesh load_mesh_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open mesh file: " + path);
  return load_mesh(in);
}

void check_mesh(const Mesh& m) {
  const int nv = (int)m.vertices.size();
  for (const auto& v : m.vertices)
    if (!std::isfinite(v.x) || !std::isfinite(v.y))
      throw NumericError("mesh check: non-finite vertex coordinate");

  for (size_t t = 0; t < m.triangles.size(); ++t) {
    for (int k = 0; k < 3; ++k)
      if (m.triangles[t].v[k] < 0 || m.triangles[t].v[k] >= nv)
        throw NumericError("mesh check: triangle vertex out of range");
    if (!(tri_area(m, (int)t) > 0.0))
      throw NumericError("mesh check: non-positive triangle orientation at triangle " +
                         std::to_string(t));
  }

  std::map<std::pair<int, int>, std::vector<int>> edge_tris;
  for (size_t t = 0; t < m.triangles.size(); ++t)
    for (int k = 0; k < 3; ++k)
      edge_tris[ukey(m.triangles[t].v[k], m.triangles[t].v[(k + 1) % 3])].push_back((int)t);

  std::map<std::pair<int, int>, const BEdge*> tagged;
  for (const auto& e : m.boundary_edges) {
    auto key = ukey(e.a, e.b);
    if (tagged.count(key)) throw NumericError("mesh check: duplicate tagged edge");
    tagged[key] = &e;
    if (!edge_tris.count(key))
      throw NumericError("mesh check: tagged edge is not an edge of any triangle");
  }

  bool has_obstacle = false;
  for (const auto& [key, tris] : edge_tris) {
    auto it = tagged.find(key);
    const BEdge* tag = (it == tagged.end()) ? nullptr : it->second;
    if (tris.size() == 1) {
      if (!tag || tag->tag == EdgeTag::Interface)
        throw NumericError("mesh check: untagged (or interface-tagged) mesh-boundary edge");
      if (tag->tag != EdgeTag::Outer) has_obstacle = true;
    } else if (tris.size() == 2) {
      int r0 = m.triangles[tris[0]].region, r1 = m.triangles[tris[1]].region;
      if (tag && tag->tag == EdgeTag::Interface) {
        if (r0 == r1)
          throw NumericError("mesh check: interface edge with equal regions on both sides");
      } else if (tag) {
        throw NumericError("mesh check: exterior-boundary tag on an interior edge");
      } else if (r0 != r1) {
        throw NumericError("mesh check: region change across an untagged edge");
      }
    } else {
      throw NumericError("mesh check: edge shared by more than two triangles");
    }
  }

  long V = nv, E = (long)edge_tris.size(), F = (long)m.triangles.size();
  long euler = V - E + F;
  if (euler != (has_obstacle ? 0 : 1))
    throw NumericError(fmt("mesh check: Euler characteristic %ld does not match a %s",
                           euler, has_obstacle ? "disk with one hole (expected 0)"
                                               : "disk (expected 1)"));
}

double min_angle_deg(const Mesh& m) {
  double worst = 180.0;
  for (const auto& t : m.triangles) {
    for (int k = 0; k < 3; ++k) {
      Vec2 a = m.vertices[t.v[k]], b = m.vertices[t.v[(k + 1) % 3]],
           c = m.vertices[t.v[(k + 2) % 3]];
      Vec2 u = b - a, w = c - a;
      double ang = std::atan2(std::abs(cross(u, w)), dot(u, w)) * 180.0 / kPi;
      worst = std::min(worst, ang);
    }
  }
  return worst;
}

std::vector<double> region_areas(const Mesh& m) {
  std::vector<double> areas(m.num_regions, 0.0);
  for (size_t t = 0; t < m.triangles.size(); ++t) {
    int r = m.triangles[t].region;
    if (r >= 0 && r < m.num_regions) areas[r] += tri_area(m, (int)t);
  }
  return areas;
}

}  // namespace sie::geo
