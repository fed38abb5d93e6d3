#include "grasp/mesh.hpp"

#include "grasp/kdtree.hpp"
#include "grasp/random.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace grasp {
namespace {

struct Tri {
  Vec3 a, b, c;
  Vec3 cross() const { return (b - a).cross(c - a); }
};

Tri triangle(const TriangleMesh& mesh, const std::array<int, 3>& f) {
  const auto n = static_cast<int>(mesh.vertices.size());
  for (int idx : f) {
    if (idx < 0 || idx >= n) throw std::out_of_range("mesh face references a missing vertex");
  }
  return {mesh.vertices[f[0]], mesh.vertices[f[1]], mesh.vertices[f[2]]};
}

double signed_area2(const std::vector<Eigen::Vector2d>& poly) {
  double s = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const auto& p = poly[i];
    const auto& q = poly[(i + 1) % poly.size()];
    s += p.x() * q.y() - q.x() * p.y();
  }
  return s;
}

double orient(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c) {
  return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

// Ear clipping for a simple counter-clockwise polygon.
std::vector<std::array<int, 3>> triangulate(const std::vector<Eigen::Vector2d>& poly) {
  std::vector<int> idx(poly.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
  std::vector<std::array<int, 3>> out;
  std::size_t guard = 0;
  while (idx.size() > 3) {
    if (++guard > 10 * poly.size() * poly.size()) {
      throw std::invalid_argument("extrusion polygon is not simple");
    }
    bool clipped = false;
    for (std::size_t i = 0; i < idx.size(); ++i) {
      const int ia = idx[(i + idx.size() - 1) % idx.size()];
      const int ib = idx[i];
      const int ic = idx[(i + 1) % idx.size()];
      if (orient(poly[ia], poly[ib], poly[ic]) <= 0.0) continue;
      bool inside = false;
      for (int j : idx) {
        if (j == ia || j == ib || j == ic) continue;
        if (orient(poly[ia], poly[ib], poly[j]) >= 0.0 &&
            orient(poly[ib], poly[ic], poly[j]) >= 0.0 &&
            orient(poly[ic], poly[ia], poly[j]) >= 0.0) {
          inside = true;
          break;
        }
      }
      if (inside) continue;
      out.push_back({ia, ib, ic});
      idx.erase(idx.begin() + static_cast<std::ptrdiff_t>(i));
      clipped = true;
      break;
    }
    if (!clipped) throw std::invalid_argument("extrusion polygon is not simple");
  }
  out.push_back({idx[0], idx[1], idx[2]});
  return out;
}

}  // namespace

Vec3 TriangleMesh::surface_centroid() const {
  Vec3 sum = Vec3::Zero();
  double total = 0.0;
  for (const auto& f : faces) {
    const Tri t = triangle(*this, f);
    const double a = 0.5 * t.cross().norm();
    sum += a * (t.a + t.b + t.c) / 3.0;
    total += a;
  }
  return total > 0.0 ? Vec3(sum / total) : mean_of(vertices);
}

double TriangleMesh::area() const {
  double total = 0.0;
  for (const auto& f : faces) total += 0.5 * triangle(*this, f).cross().norm();
  return total;
}

void TriangleMesh::transform(const RigidTransform& tf) {
  for (auto& v : vertices) v = tf.apply(v);
}

void TriangleMesh::append(const TriangleMesh& other) {
  const auto offset = static_cast<int>(vertices.size());
  vertices.insert(vertices.end(), other.vertices.begin(), other.vertices.end());
  for (const auto& f : other.faces) faces.push_back({f[0] + offset, f[1] + offset, f[2] + offset});
}

SurfacePointCloud sample_mesh(const TriangleMesh& mesh, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("sample_mesh: sample count must be positive");

  std::vector<double> cumulative;
  std::vector<std::size_t> live;
  cumulative.reserve(mesh.faces.size());
  double total = 0.0;
  double max_edge2 = 0.0;
  for (const auto& v : mesh.vertices) max_edge2 = std::max(max_edge2, v.squaredNorm());
  for (std::size_t i = 0; i < mesh.faces.size(); ++i) {
    const double a = 0.5 * triangle(mesh, mesh.faces[i]).cross().norm();
    if (!(a > 1e-14 * std::max(max_edge2, 1e-300))) continue;
    total += a;
    cumulative.push_back(total);
    live.push_back(i);
  }
  if (live.empty()) throw std::invalid_argument("sample_mesh: mesh has no non-degenerate triangle");

  // Global orientation vote.
  const Vec3 centroid = mesh.surface_centroid();
  double vote = 0.0;
  for (std::size_t i : live) {
    const Tri t = triangle(mesh, mesh.faces[i]);
    const Vec3 c = t.cross();
    vote += c.dot((t.a + t.b + t.c) / 3.0 - centroid);
  }
  const double sign = vote < 0.0 ? -1.0 : 1.0;

  Rng rng(seed);
  std::vector<Vec3> points;
  std::vector<Vec3> normals;
  points.reserve(n);
  normals.reserve(n);
  for (std::size_t s = 0; s < n; ++s) {
    const double pick = uniform01(rng) * total;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), pick);
    if (it == cumulative.end()) --it;
    const Tri t = triangle(mesh, mesh.faces[live[static_cast<std::size_t>(it - cumulative.begin())]]);
    const double r1 = std::sqrt(uniform01(rng));
    const double r2 = uniform01(rng);
    points.push_back((1.0 - r1) * t.a + r1 * (1.0 - r2) * t.b + r1 * r2 * t.c);
    normals.push_back(sign * t.cross().normalized());
  }
  return {std::move(points), std::move(normals)};
}

std::vector<Vec3> estimate_normals(const std::vector<Vec3>& points, std::size_t k) {
  if (points.empty()) throw std::invalid_argument("empty point cloud");
  const KdTree tree(points);
  const Vec3 centroid = mean_of(points);
  std::vector<Vec3> normals;
  normals.reserve(points.size());
  for (const auto& p : points) {
    const auto nbrs = tree.nearest_k(p, std::max<std::size_t>(k, 3));
    Vec3 mu = Vec3::Zero();
    for (const auto& nb : nbrs) mu += points[nb.index];
    mu /= static_cast<double>(nbrs.size());
    Mat3 cov = Mat3::Zero();
    for (const auto& nb : nbrs) {
      const Vec3 d = points[nb.index] - mu;
      cov += d * d.transpose();
    }
    Vec3 n;
    if (nbrs.size() < 3 || cov.trace() <= 0.0) {
      n = p - centroid;
    } else {
      const Eigen::SelfAdjointEigenSolver<Mat3> eig(cov);
      n = eig.eigenvectors().col(0);
    }
    if (n.squaredNorm() == 0.0) n = Vec3::UnitZ();
    n.normalize();
    if (n.dot(p - centroid) < 0.0) n = -n;
    normals.push_back(n);
  }
  return normals;
}

SurfacePointCloud clip_below(const SurfacePointCloud& cloud, double z_min) {
  std::vector<Vec3> pts;
  std::vector<Vec3> nrm;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (cloud.point(i).z() < z_min) continue;
    pts.push_back(cloud.point(i));
    nrm.push_back(cloud.normal(i));
  }
  if (pts.empty()) throw std::invalid_argument("clip_below: no points left above the plane");
  return {std::move(pts), std::move(nrm), cloud.center_of_mass()};
}

TriangleMesh make_box_mesh(const Vec3& h, const Vec3& center) {
  TriangleMesh m;
  for (int i = 0; i < 8; ++i) {
    m.vertices.push_back(center + Vec3((i & 1) ? h.x() : -h.x(), (i & 2) ? h.y() : -h.y(),
                                       (i & 4) ? h.z() : -h.z()));
  }
  // Quads wound counter-clockwise seen from outside.
  const int quads[6][4] = {{0, 2, 3, 1}, {4, 5, 7, 6}, {0, 1, 5, 4},
                           {2, 6, 7, 3}, {0, 4, 6, 2}, {1, 3, 7, 5}};
  for (const auto& q : quads) {
    m.faces.push_back({q[0], q[1], q[2]});
    m.faces.push_back({q[0], q[2], q[3]});
  }
  return m;
}

TriangleMesh make_uv_sphere_mesh(double radius, const Vec3& center, int stacks, int slices) {
  TriangleMesh m;
  m.vertices.push_back(center + Vec3(0, 0, radius));
  for (int i = 1; i < stacks; ++i) {
    const double phi = std::numbers::pi * i / stacks;
    for (int j = 0; j < slices; ++j) {
      const double th = 2.0 * std::numbers::pi * j / slices;
      m.vertices.push_back(center + radius * Vec3(std::sin(phi) * std::cos(th),
                                                   std::sin(phi) * std::sin(th), std::cos(phi)));
    }
  }
  m.vertices.push_back(center - Vec3(0, 0, radius));
  const int south = static_cast<int>(m.vertices.size()) - 1;
  auto ring = [&](int i, int j) { return 1 + (i - 1) * slices + (j % slices); };
  for (int j = 0; j < slices; ++j) m.faces.push_back({0, ring(1, j), ring(1, j + 1)});
  for (int i = 1; i + 1 < stacks; ++i) {
    for (int j = 0; j < slices; ++j) {
      m.faces.push_back({ring(i, j), ring(i + 1, j), ring(i + 1, j + 1)});
      m.faces.push_back({ring(i, j), ring(i + 1, j + 1), ring(i, j + 1)});
    }
  }
  for (int j = 0; j < slices; ++j) m.faces.push_back({south, ring(stacks - 1, j + 1), ring(stacks - 1, j)});
  return m;
}

TriangleMesh make_cylinder_mesh(double radius, double height, const Vec3& base_center,
                                int slices) {
  TriangleMesh m;
  for (int layer = 0; layer < 2; ++layer) {
    for (int j = 0; j < slices; ++j) {
      const double th = 2.0 * std::numbers::pi * j / slices;
      m.vertices.push_back(base_center +
                           Vec3(radius * std::cos(th), radius * std::sin(th), layer * height));
    }
  }
  const int bottom = static_cast<int>(m.vertices.size());
  m.vertices.push_back(base_center);
  const int top = bottom + 1;
  m.vertices.push_back(base_center + Vec3(0, 0, height));
  for (int j = 0; j < slices; ++j) {
    const int a = j, b = (j + 1) % slices;
    m.faces.push_back({a, b, b + slices});
    m.faces.push_back({a, b + slices, a + slices});
    m.faces.push_back({bottom, b, a});
    m.faces.push_back({top, a + slices, b + slices});
  }
  return m;
}

TriangleMesh make_torus_mesh(double major_radius, double minor_radius, const Vec3& center,
                             int major_segments, int minor_segments) {
  TriangleMesh m;
  for (int i = 0; i < major_segments; ++i) {
    const double u = 2.0 * std::numbers::pi * i / major_segments;
    for (int j = 0; j < minor_segments; ++j) {
      const double v = 2.0 * std::numbers::pi * j / minor_segments;
      const double r = major_radius + minor_radius * std::cos(v);
      m.vertices.push_back(center + Vec3(r * std::cos(u), r * std::sin(u), minor_radius * std::sin(v)));
    }
  }
  auto at = [&](int i, int j) {
    return (i % major_segments) * minor_segments + (j % minor_segments);
  };
  for (int i = 0; i < major_segments; ++i) {
    for (int j = 0; j < minor_segments; ++j) {
      m.faces.push_back({at(i, j), at(i + 1, j), at(i + 1, j + 1)});
      m.faces.push_back({at(i, j), at(i + 1, j + 1), at(i, j + 1)});
    }
  }
  return m;
}

TriangleMesh make_extruded_mesh(const std::vector<Eigen::Vector2d>& polygon_xz, double depth) {
  if (polygon_xz.size() < 3) throw std::invalid_argument("extrusion polygon needs 3 vertices");
  std::vector<Eigen::Vector2d> poly = polygon_xz;
  if (signed_area2(poly) < 0.0) std::reverse(poly.begin(), poly.end());
  const int n = static_cast<int>(poly.size());
  TriangleMesh m;
  for (int side = 0; side < 2; ++side) {
    const double y = side == 0 ? -0.5 * depth : 0.5 * depth;
    for (const auto& p : poly) m.vertices.emplace_back(p.x(), y, p.y());
  }
  // Counter-clockwise in (x, z) faces -y, so the -y cap keeps the order.
  for (const auto& t : triangulate(poly)) {
    m.faces.push_back({t[0], t[1], t[2]});
    m.faces.push_back({t[0] + n, t[2] + n, t[1] + n});
  }
  for (int i = 0; i < n; ++i) {
    const int a = i, b = (i + 1) % n;
    m.faces.push_back({a, b + n, b});
    m.faces.push_back({a, a + n, b + n});
  }
  return m;
}

}  // namespace grasp
