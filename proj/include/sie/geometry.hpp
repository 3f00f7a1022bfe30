#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sie/common.hpp"

namespace sie::geo {

struct Vec2 {
  double x = 0.0, y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
double norm(Vec2 a);

enum class EdgeTag { Outer, Dirichlet, Neumann, Interface };

/// One arc of the obstacle circle, [theta0, theta1) in radians, tagged
/// Dirichlet or Neumann.
struct BoundaryArc {
  double theta0 = 0.0, theta1 = 0.0;
  EdgeTag tag = EdgeTag::Dirichlet;
};

struct Obstacle {
  double radius = 0.0;
  std::vector<BoundaryArc> arcs;
};

/// Concentric-circle scene: truncation circle S_R, interfaces strictly
/// inside it (ascending radii), optional obstacle strictly inside the
/// innermost interface.
struct GeometrySpec {
  double truncation_radius = 0.0;
  std::vector<double> interface_radii;
  std::optional<Obstacle> obstacle;

  /// Number of coefficient regions (interfaces + 1).  Region 0 is the
  /// outermost band; ids grow inward.
  int num_regions() const { return static_cast<int>(interface_radii.size()) + 1; }
};

/// Throws ConfigError when the spec violates its admissibility rules.
void validate_spec(const GeometrySpec& spec);

struct Tri {
  std::array<int, 3> v{};
  int region = 0;
};

/// Tagged (oriented, counterclockwise) edge on the outer circle, the
/// obstacle circle, or one of the interface circles.
struct BEdge {
  int a = 0, b = 0;
  EdgeTag tag = EdgeTag::Outer;
  int iface = -1;  // interface id when tag == Interface
};

struct Mesh {
  std::vector<Vec2> vertices;
  std::vector<Tri> triangles;
  std::vector<BEdge> boundary_edges;
  int num_regions = 1;
  double h = 0.0;  // max edge length
};

/// Structured polar mesh: ring ladders between anchor circles, merged by an
/// angular sweep.  All interface circles appear as closed polylines of mesh
/// edges; ring node counts are even so the mesh is symmetric under rotation
/// by pi (when no obstacle arcs break the symmetry).
Mesh build_concentric_mesh(const GeometrySpec& spec, double target_h);

/// Uniform red refinement; new nodes created on tagged circles are snapped
/// back onto the circle radially.
Mesh refine(const Mesh& mesh);

/// Mesh with the interface `iface` slit open: every node of the interface
/// circle is duplicated, triangles strictly inside keep the original nodes,
/// triangles outside reference the duplicates.
struct CrackMesh {
  Mesh mesh;
  int iface = -1;
  /// (interior copy, exterior copy) node ids, ordered along the loop.
  std::vector<std::pair<int, int>> pairs;
};

CrackMesh make_crack_mesh(const Mesh& mesh, int iface);

/// Undo make_crack_mesh; exact node-for-node inverse.
Mesh collapse(const CrackMesh& crack);

/// Text format: header "siemesh 1", then lines
///   v <x> <y>               vertices, 17 significant digits
///   t <i> <j> <k> <region>  triangles, 0-based indices
///   e <i> <j> <TAG>         tagged edges, TAG in OUTER|DIR|NEU|IFACE:<j>
void save_mesh(const Mesh& mesh, std::ostream& out);
Mesh load_mesh(std::istream& in);
void save_mesh_file(const Mesh& mesh, const std::string& path);
Mesh load_mesh_file(const std::string& path);

/// Structural validation: positive orientation, interior edges shared by
/// exactly two triangles, regions changing only across interface edges,
/// Euler characteristic of a disk (or annulus when an obstacle is present).
/// Throws NumericError on violation.
void check_mesh(const Mesh& mesh);

double min_angle_deg(const Mesh& mesh);
double tri_area(const Mesh& mesh, int t);
std::vector<double> region_areas(const Mesh& mesh);

/// Ordered counterclockwise node loop of interface `iface` (or of the outer
/// circle).  Starts at the lowest node id; throws if the polyline is not a
/// single closed loop.
std::vector<int> interface_loop(const Mesh& mesh, int iface);
std::vector<int> outer_loop(const Mesh& mesh);

/// Ordered counterclockwise obstacle-boundary node loop (Dirichlet and
/// Neumann edges together); empty when there is no obstacle.
std::vector<int> obstacle_loop(const Mesh& mesh);

}  // namespace sie::geo
