#include "rhls/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>
#include <string>

namespace rhls {

double dist(const Point& a, const Point& b, int dim) {
  double s = 0;
  for (int d = 0; d < dim; ++d) {
    const double t = a[d] - b[d];
    s += t * t;
  }
  return std::sqrt(s);
}

double norm(const Point& a, int dim) {
  double s = 0;
  for (int d = 0; d < dim; ++d) s += a[d] * a[d];
  return std::sqrt(s);
}

double dot(const Point& a, const Point& b, int dim) {
  double s = 0;
  for (int d = 0; d < dim; ++d) s += a[d] * b[d];
  return s;
}

const char* shape_tag_name(ShapeTag tag) {
  switch (tag) {
    case ShapeTag::interval: return "interval";
    case ShapeTag::box: return "box";
    case ShapeTag::ball: return "ball";
    case ShapeTag::polygon: return "polygon";
  }
  return "unknown";
}

ShapeTag shape_tag_from_name(const std::string& name) {
  if (name == "interval") return ShapeTag::interval;
  if (name == "box") return ShapeTag::box;
  if (name == "ball") return ShapeTag::ball;
  if (name == "polygon") return ShapeTag::polygon;
  throw std::invalid_argument("unknown shape_tag: " + name);
}

MeshPtr build_interval_mesh(double a, double b, int cells) {
  if (!std::isfinite(a) || !std::isfinite(b))
    throw std::invalid_argument("interval endpoints must be finite");
  if (!(a < b)) throw std::invalid_argument("interval requires a < b");
  if (cells < 1) throw std::invalid_argument("interval requires cells >= 1");

  auto mesh = std::make_shared<Mesh>();
  mesh->dim = 1;
  mesh->shape_tag = ShapeTag::interval;
  const double h = (b - a) / cells;
  mesh->nodes.reserve(cells);
  mesh->weights.assign(cells, h);
  mesh->cells.reserve(cells);
  for (int i = 0; i < cells; ++i) {
    Point p{};
    p[0] = a + (i + 0.5) * h;
    mesh->nodes.push_back(p);
    BoxCell c{};
    c.lo[0] = a + i * h;
    c.hi[0] = a + (i + 1) * h;
    mesh->cells.emplace_back(c);
  }
  mesh->boundary_nodes = {Point{a, 0, 0}, Point{b, 0, 0}};
  mesh->boundary_weights = {1.0, 1.0};
  mesh->boundary_normals = {Point{-1.0, 0, 0}, Point{1.0, 0, 0}};
  mesh->lows = Point{a, 0, 0};
  mesh->highs = Point{b, 0, 0};
  mesh->analytic_diameter = b - a;
  return mesh;
}

namespace {

// Dihedral images of an in-octant planar point (x, y), 0 < y < x, together
// with the angular sector index each image's cell occupies. Swap and sign
// flips are exact, so the node set is bitwise closed under the group.
struct OctantImage {
  double x, y;
  int sector;
};

std::array<OctantImage, 8> dihedral_images(double x, double y, int k, int nth) {
  const int m8 = nth / 8;
  return {{{x, y, k},
           {y, x, 2 * m8 - 1 - k},
           {-y, x, 2 * m8 + k},
           {-x, y, 4 * m8 - 1 - k},
           {-x, -y, 4 * m8 + k},
           {-y, -x, 6 * m8 - 1 - k},
           {y, -x, 6 * m8 + k},
           {x, -y, 8 * m8 - 1 - k}}};
}

// Area centroid radius of the annular sector [r0,r1] x [-dth/2, dth/2].
double sector_centroid_radius(double r0, double r1, double dth) {
  const double num = 4.0 * std::sin(dth / 2) * (r1 * r1 * r1 - r0 * r0 * r0);
  const double den = 3.0 * dth * (r1 * r1 - r0 * r0);
  return num / den;
}

MeshPtr build_disk_mesh(double radius, int refinement) {
  const int nr = 1 << refinement;
  const int nth = 1 << (refinement + 2);  // divisible by 8
  const double dth = 2.0 * M_PI / nth;

  auto mesh = std::make_shared<Mesh>();
  mesh->dim = 2;
  mesh->shape_tag = ShapeTag::ball;
  mesh->radius = radius;
  mesh->analytic_diameter = 2 * radius;

  for (int i = 0; i < nr; ++i) {
    const double r0 = radius * i / nr;
    const double r1 = radius * (i + 1) / nr;
    const double area = 0.5 * (r1 * r1 - r0 * r0) * dth;
    const double rc = sector_centroid_radius(r0, r1, dth);
    for (int k = 0; k < nth / 8; ++k) {
      const double th = (k + 0.5) * dth;
      const double x = rc * std::cos(th);
      const double y = rc * std::sin(th);
      for (const auto& im : dihedral_images(x, y, k, nth)) {
        mesh->nodes.push_back(Point{im.x, im.y, 0});
        mesh->weights.push_back(area);
        mesh->cells.emplace_back(
            PolarCell{r0, r1, im.sector * dth, (im.sector + 1) * dth});
      }
    }
  }
  for (int k = 0; k < nth / 8; ++k) {
    const double th = (k + 0.5) * dth;
    const double dx = std::cos(th);
    const double dy = std::sin(th);
    for (const auto& im : dihedral_images(dx, dy, k, nth)) {
      mesh->boundary_nodes.push_back(Point{radius * im.x, radius * im.y, 0});
      mesh->boundary_weights.push_back(radius * dth);
      mesh->boundary_normals.push_back(Point{im.x, im.y, 0});
    }
  }
  return mesh;
}

MeshPtr build_ball3_mesh(double radius, int refinement) {
  const int nr = 1 << refinement;
  // cos(theta) spans a length-2 range, so it gets twice the radial count
  // to keep the cells isotropic.
  const int nc = 1 << (refinement + 1);
  const int nph = 1 << (refinement + 2);
  const double dph = 2.0 * M_PI / nph;

  auto mesh = std::make_shared<Mesh>();
  mesh->dim = 3;
  mesh->shape_tag = ShapeTag::ball;
  mesh->radius = radius;
  mesh->analytic_diameter = 2 * radius;

  const double dc = 2.0 / nc;
  for (int i = 0; i < nr; ++i) {
    const double r0 = radius * i / nr;
    const double r1 = radius * (i + 1) / nr;
    const double m3 = (r1 * r1 * r1 - r0 * r0 * r0) / 3.0;
    const double m4 = (r1 * r1 * r1 * r1 - r0 * r0 * r0 * r0) / 4.0;
    for (int j = 0; j < nc / 2; ++j) {  // positive-c half, mirrored below
      const double c0 = j * dc;
      const double c1 = (j + 1) * dc;
      const double vol = m3 * (c1 - c0) * dph;
      const double zbar = m4 * 0.5 * (c1 * c1 - c0 * c0) * dph / vol;
      const double ic =
          0.5 * ((c1 * std::sqrt(1 - c1 * c1) + std::asin(c1)) -
                 (c0 * std::sqrt(1 - c0 * c0) + std::asin(c0)));
      const double rho = m4 * ic * 2.0 * std::sin(dph / 2) / vol;
      for (int k = 0; k < nph / 8; ++k) {
        const double ph = (k + 0.5) * dph;
        const double x = rho * std::cos(ph);
        const double y = rho * std::sin(ph);
        for (const auto& im : dihedral_images(x, y, k, nph)) {
          const double ph0 = im.sector * dph;
          const double ph1 = (im.sector + 1) * dph;
          mesh->nodes.push_back(Point{im.x, im.y, zbar});
          mesh->weights.push_back(vol);
          mesh->cells.emplace_back(SphericalCell{r0, r1, c0, c1, ph0, ph1});
          mesh->nodes.push_back(Point{im.x, im.y, -zbar});
          mesh->weights.push_back(vol);
          mesh->cells.emplace_back(SphericalCell{r0, r1, -c1, -c0, ph0, ph1});
        }
      }
    }
  }
  for (int j = 0; j < nc / 2; ++j) {
    const double c0 = j * dc;
    const double c1 = (j + 1) * dc;
    const double chat = 0.5 * (c0 + c1);
    const double t = std::sqrt(1 - chat * chat);
    const double area = radius * radius * (c1 - c0) * dph;
    for (int k = 0; k < nph / 8; ++k) {
      const double ph = (k + 0.5) * dph;
      const double x = t * std::cos(ph);
      const double y = t * std::sin(ph);
      for (const auto& im : dihedral_images(x, y, k, nph)) {
        for (double sz : {1.0, -1.0}) {
          mesh->boundary_nodes.push_back(
              Point{radius * im.x, radius * im.y, radius * sz * chat});
          mesh->boundary_weights.push_back(area);
          mesh->boundary_normals.push_back(Point{im.x, im.y, sz * chat});
        }
      }
    }
  }
  return mesh;
}

}  // namespace

MeshPtr build_ball_mesh(int dim, double radius, int refinement) {
  if (dim != 2 && dim != 3)
    throw std::invalid_argument("ball mesh supports dim 2 or 3");
  if (!(radius > 0) || !std::isfinite(radius))
    throw std::invalid_argument("ball radius must be positive");
  if (refinement < 1)
    throw std::invalid_argument(
        "ball refinement too small: need >= 2 radial shells");
  return dim == 2 ? build_disk_mesh(radius, refinement)
                  : build_ball3_mesh(radius, refinement);
}

MeshPtr build_box_mesh(int dim, const Point& lows, const Point& highs,
                       const std::array<int, 3>& cells_per_axis) {
  if (dim != 2 && dim != 3)
    throw std::invalid_argument("box mesh supports dim 2 or 3");
  for (int d = 0; d < dim; ++d) {
    if (!std::isfinite(lows[d]) || !std::isfinite(highs[d]))
      throw std::invalid_argument("box bounds must be finite");
    if (!(lows[d] < highs[d]))
      throw std::invalid_argument("box axis " + std::to_string(d) +
                                  " is degenerate");
    if (cells_per_axis[d] < 1)
      throw std::invalid_argument("box needs >= 1 cell per axis");
  }

  auto mesh = std::make_shared<Mesh>();
  mesh->dim = dim;
  mesh->shape_tag = ShapeTag::box;
  mesh->lows = lows;
  mesh->highs = highs;
  double diam2 = 0;
  std::array<double, 3> h{};
  for (int d = 0; d < dim; ++d) {
    h[d] = (highs[d] - lows[d]) / cells_per_axis[d];
    diam2 += (highs[d] - lows[d]) * (highs[d] - lows[d]);
  }
  mesh->analytic_diameter = std::sqrt(diam2);

  const int mx = cells_per_axis[0];
  const int my = cells_per_axis[1];
  const int mz = dim == 3 ? cells_per_axis[2] : 1;
  double cellw = h[0] * h[1];
  if (dim == 3) cellw *= h[2];
  for (int iz = 0; iz < mz; ++iz)
    for (int iy = 0; iy < my; ++iy)
      for (int ix = 0; ix < mx; ++ix) {
        Point p{lows[0] + (ix + 0.5) * h[0], lows[1] + (iy + 0.5) * h[1], 0};
        BoxCell c{};
        c.lo = Point{lows[0] + ix * h[0], lows[1] + iy * h[1], 0};
        c.hi = Point{lows[0] + (ix + 1) * h[0], lows[1] + (iy + 1) * h[1], 0};
        if (dim == 3) {
          p[2] = lows[2] + (iz + 0.5) * h[2];
          c.lo[2] = lows[2] + iz * h[2];
          c.hi[2] = lows[2] + (iz + 1) * h[2];
        }
        mesh->nodes.push_back(p);
        mesh->weights.push_back(cellw);
        mesh->cells.emplace_back(c);
      }

  // One face grid per axis and side, matching the interior resolution.
  for (int axis = 0; axis < dim; ++axis) {
    const int a1 = (axis + 1) % dim;
    const int a2 = (axis + 2) % dim;
    const int m1 = cells_per_axis[a1];
    const int m2 = dim == 3 ? cells_per_axis[a2] : 1;
    double facew = h[a1];
    if (dim == 3) facew *= h[a2];
    for (int side = 0; side < 2; ++side) {
      const double plane = side == 0 ? lows[axis] : highs[axis];
      Point nu{};
      nu[axis] = side == 0 ? -1.0 : 1.0;
      for (int j2 = 0; j2 < m2; ++j2)
        for (int j1 = 0; j1 < m1; ++j1) {
          Point p{};
          p[axis] = plane;
          p[a1] = lows[a1] + (j1 + 0.5) * h[a1];
          if (dim == 3) p[a2] = lows[a2] + (j2 + 0.5) * h[a2];
          mesh->boundary_nodes.push_back(p);
          mesh->boundary_weights.push_back(facew);
          mesh->boundary_normals.push_back(nu);
        }
    }
  }
  return mesh;
}

double diameter(const Mesh& mesh) {
  if (mesh.nodes.empty()) throw std::invalid_argument("diameter of empty mesh");
  if (mesh.analytic_diameter > 0) return mesh.analytic_diameter;
  const auto& b = mesh.boundary_nodes.empty() ? mesh.nodes : mesh.boundary_nodes;
  double best = 0;
  for (std::size_t i = 0; i < b.size(); ++i)
    for (std::size_t j = i + 1; j < b.size(); ++j)
      best = std::max(best, dist(b[i], b[j], mesh.dim));
  return best;
}

StarCheckResult star_check(const Mesh& mesh, const StarCenter& center) {
  if (mesh.boundary_nodes.empty() ||
      mesh.boundary_normals.size() != mesh.boundary_nodes.size())
    throw std::invalid_argument("star_check requires boundary normals");
  double mind = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < mesh.boundary_nodes.size(); ++i) {
    Point rel = mesh.boundary_nodes[i];
    for (int d = 0; d < mesh.dim; ++d) rel[d] -= center.point[d];
    mind = std::min(mind, dot(rel, mesh.boundary_normals[i], mesh.dim));
  }
  return {mind > 0, mind};
}

void subdivide_cell(const Mesh& mesh, std::size_t i, int k,
                    std::vector<Point>& sub_nodes,
                    std::vector<double>& sub_weights) {
  if (k < 1) throw std::invalid_argument("subdivision count must be >= 1");
  const Cell& cell = mesh.cells.at(i);
  if (const auto* box = std::get_if<BoxCell>(&cell)) {
    std::array<double, 3> hh{};
    for (int d = 0; d < mesh.dim; ++d) hh[d] = (box->hi[d] - box->lo[d]) / k;
    double w = 1;
    for (int d = 0; d < mesh.dim; ++d) w *= hh[d];
    const int ky = mesh.dim >= 2 ? k : 1;
    const int kz = mesh.dim >= 3 ? k : 1;
    for (int iz = 0; iz < kz; ++iz)
      for (int iy = 0; iy < ky; ++iy)
        for (int ix = 0; ix < k; ++ix) {
          Point p{};
          p[0] = box->lo[0] + (ix + 0.5) * hh[0];
          if (mesh.dim >= 2) p[1] = box->lo[1] + (iy + 0.5) * hh[1];
          if (mesh.dim >= 3) p[2] = box->lo[2] + (iz + 0.5) * hh[2];
          sub_nodes.push_back(p);
          sub_weights.push_back(w);
        }
  } else if (const auto* pc = std::get_if<PolarCell>(&cell)) {
    const double dr = (pc->r1 - pc->r0) / k;
    const double dt = (pc->th1 - pc->th0) / k;
    for (int ir = 0; ir < k; ++ir) {
      const double r0 = pc->r0 + ir * dr;
      const double r1 = pc->r0 + (ir + 1) * dr;
      const double area = 0.5 * (r1 * r1 - r0 * r0) * dt;
      const double rc = sector_centroid_radius(r0, r1, dt);
      for (int it = 0; it < k; ++it) {
        const double tm = pc->th0 + (it + 0.5) * dt;
        sub_nodes.push_back(Point{mesh.center[0] + rc * std::cos(tm),
                                  mesh.center[1] + rc * std::sin(tm), 0});
        sub_weights.push_back(area);
      }
    }
  } else if (const auto* sc = std::get_if<SphericalCell>(&cell)) {
    const double dr = (sc->r1 - sc->r0) / k;
    const double dc = (sc->c1 - sc->c0) / k;
    const double dp = (sc->ph1 - sc->ph0) / k;
    for (int ir = 0; ir < k; ++ir) {
      const double r0 = sc->r0 + ir * dr;
      const double r1 = sc->r0 + (ir + 1) * dr;
      const double m3 = (r1 * r1 * r1 - r0 * r0 * r0) / 3.0;
      const double m4 = (r1 * r1 * r1 * r1 - r0 * r0 * r0 * r0) / 4.0;
      for (int ic = 0; ic < k; ++ic) {
        const double c0 = sc->c0 + ic * dc;
        const double c1 = sc->c0 + (ic + 1) * dc;
        const double vol = m3 * (c1 - c0) * dp;
        const double zbar = m4 * 0.5 * (c1 * c1 - c0 * c0) * dp / vol;
        const double icab =
            0.5 * ((c1 * std::sqrt(std::max(0.0, 1 - c1 * c1)) + std::asin(c1)) -
                   (c0 * std::sqrt(std::max(0.0, 1 - c0 * c0)) + std::asin(c0)));
        const double rho = m4 * icab * 2.0 * std::sin(dp / 2) / vol;
        for (int ip = 0; ip < k; ++ip) {
          const double pm = sc->ph0 + (ip + 0.5) * dp;
          sub_nodes.push_back(Point{mesh.center[0] + rho * std::cos(pm),
                                    mesh.center[1] + rho * std::sin(pm),
                                    mesh.center[2] + zbar});
          sub_weights.push_back(vol);
        }
      }
    }
  }
}

bool contains_point(const Mesh& mesh, const Point& x, double tol) {
  switch (mesh.shape_tag) {
    case ShapeTag::interval:
    case ShapeTag::box: {
      for (int d = 0; d < mesh.dim; ++d)
        if (x[d] < mesh.lows[d] - tol || x[d] > mesh.highs[d] + tol)
          return false;
      return true;
    }
    case ShapeTag::ball:
      return dist(x, mesh.center, mesh.dim) <= mesh.radius + tol;
    case ShapeTag::polygon: {
      // No analytic shape; accept points within one cell width of a node.
      double spacing = 0;
      for (const auto& cell : mesh.cells)
        if (const auto* box = std::get_if<BoxCell>(&cell))
          spacing = std::max(spacing, dist(box->lo, box->hi, mesh.dim));
      double best = std::numeric_limits<double>::infinity();
      for (const auto& p : mesh.nodes)
        best = std::min(best, dist(p, x, mesh.dim));
      return best <= spacing + tol;
    }
  }
  return false;
}

std::uint64_t mesh_hash(const Mesh& mesh) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= p[i];
      h *= 1099511628211ull;
    }
  };
  auto mix_d = [&](double v) { mix(&v, sizeof v); };
  auto mix_i = [&](std::uint64_t v) { mix(&v, sizeof v); };

  mix_i(static_cast<std::uint64_t>(mesh.dim));
  mix_i(static_cast<std::uint64_t>(mesh.shape_tag));
  mix_i(mesh.nodes.size());
  mix_i(mesh.boundary_nodes.size());
  for (std::size_t i = 0; i < mesh.nodes.size(); ++i) {
    for (int d = 0; d < mesh.dim; ++d) mix_d(mesh.nodes[i][d]);
    mix_d(mesh.weights[i]);
  }
  for (std::size_t i = 0; i < mesh.boundary_nodes.size(); ++i) {
    for (int d = 0; d < mesh.dim; ++d) {
      mix_d(mesh.boundary_nodes[i][d]);
      mix_d(mesh.boundary_normals[i][d]);
    }
    mix_d(mesh.boundary_weights[i]);
  }
  return h;
}

}  // namespace rhls
