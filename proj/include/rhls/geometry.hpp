#ifndef RHLS_GEOMETRY_HPP
#define RHLS_GEOMETRY_HPP

#include <array>
#include <cstdint>
#include <memory>
#include <variant>
#include <vector>

namespace rhls {

// Points are stored with fixed capacity 3; entries beyond the mesh
// dimension are zero and ignored.
using Point = std::array<double, 3>;

double dist(const Point& a, const Point& b, int dim);
double norm(const Point& a, int dim);
double dot(const Point& a, const Point& b, int dim);

enum class ShapeTag { interval, box, ball, polygon };

const char* shape_tag_name(ShapeTag tag);
ShapeTag shape_tag_from_name(const std::string& name);

/// Axis-aligned box cell (intervals are 1-D boxes).
struct BoxCell {
  Point lo{};
  Point hi{};
};

/// Annular sector about the mesh's ball center, dim == 2.
struct PolarCell {
  double r0, r1;
  double th0, th1;
};

/// Spherical product cell in (r, cos(theta), phi), dim == 3.
struct SphericalCell {
  double r0, r1;
  double c0, c1;
  double ph0, ph1;
};

using Cell = std::variant<BoxCell, PolarCell, SphericalCell>;

/// Quadrature mesh of a bounded domain: midpoint/centroid nodes with exact
/// cell measures, plus a matching surface discretization of the boundary.
/// Immutable after construction; share via MeshPtr.
struct Mesh {
  int dim = 1;
  ShapeTag shape_tag = ShapeTag::interval;

  std::vector<Point> nodes;      // cell centroids
  std::vector<double> weights;   // positive cell measures
  std::vector<Cell> cells;       // one descriptor per node

  std::vector<Point> boundary_nodes;
  std::vector<double> boundary_weights;
  std::vector<Point> boundary_normals;  // unit outward

  // Analytic shape data filled by the builders.
  Point center{};          // ball
  double radius = 0.0;     // ball
  Point lows{}, highs{};   // interval / box
  double analytic_diameter = 0.0;
};

using MeshPtr = std::shared_ptr<const Mesh>;

/// Uniform midpoint cells on [a, b]; boundary is the two endpoints with
/// normals -1, +1 and unit (counting) surface measure.
MeshPtr build_interval_mesh(double a, double b, int cells);

/// Ball about the origin from polar (dim 2) or spherical (dim 3) product
/// cells: 2^refinement radial shells, 2^(refinement+2) angular sectors
/// (and 2^refinement cos-theta bands in 3-D). Cell measures are exact and
/// the node set is exactly invariant under the dihedral symmetries of the
/// angular partition: nodes are generated in one octant and closed under
/// coordinate swaps and sign flips, which are exact in floating point.
MeshPtr build_ball_mesh(int dim, double radius, int refinement);

/// Tensor midpoint grid on a box; boundary faces carry the matching
/// surface quadrature with axis-aligned outward normals.
MeshPtr build_box_mesh(int dim, const Point& lows, const Point& highs,
                       const std::array<int, 3>& cells_per_axis);

/// Analytic diameter for interval/box/ball; max pairwise distance over
/// boundary nodes otherwise.
double diameter(const Mesh& mesh);

struct StarCenter {
  Point point{};  // defaults to the origin
};

struct StarCheckResult {
  bool star_shaped;
  double min_boundary_dot;  // min over boundary of (x - center) . nu
};

/// True iff (x - center) . nu > 0 at every boundary node. The minimum dot
/// product is returned for use in boundary-sign arguments.
StarCheckResult star_check(const Mesh& mesh, const StarCenter& center = {});

/// Splits cell i into k uniform pieces per coordinate and appends their
/// centroids and exact measures.
void subdivide_cell(const Mesh& mesh, std::size_t i, int k,
                    std::vector<Point>& sub_nodes,
                    std::vector<double>& sub_weights);

/// Distance-tolerant membership test against the analytic shape.
bool contains_point(const Mesh& mesh, const Point& x, double tol);

/// FNV-1a over the mesh's defining data; used to pair solution files with
/// the mesh they were computed on.
std::uint64_t mesh_hash(const Mesh& mesh);

}  // namespace rhls

#endif
