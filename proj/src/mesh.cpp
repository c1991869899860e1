#include "plate/mesh.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <utility>

namespace plate {

namespace {

double signed_area(const Point2& a, const Point2& b, const Point2& c) {
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y()));
}

struct ReferenceMesh {
  std::vector<Point2> vertices;
  std::vector<std::array<int, 3>> triangles;
};

ReferenceMesh base_square() {
  const double a = 1.0 / std::numbers::sqrt2;
  ReferenceMesh m;
  m.vertices = {Point2(0.0, 0.0), Point2(a, -a), Point2(a, a), Point2(-a, a), Point2(-a, -a)};
  m.triangles = {{0, 1, 2}, {0, 2, 3}, {0, 3, 4}, {0, 4, 1}};
  return m;
}

// Red refinement: every triangle is split into four through its edge
// midpoints. New vertices are numbered in order of first appearance.
ReferenceMesh red_refine(const ReferenceMesh& in) {
  ReferenceMesh out;
  out.vertices = in.vertices;
  out.triangles.reserve(4 * in.triangles.size());
  std::map<std::pair<int, int>, int> midpoint;
  auto mid = [&](int a, int b) {
    const auto key = std::minmax(a, b);
    auto [it, inserted] = midpoint.try_emplace(key, static_cast<int>(out.vertices.size()));
    if (inserted) {
      const Point2& p = in.vertices[key.first];
      const Point2& q = in.vertices[key.second];
      out.vertices.emplace_back(0.5 * (p.x() + q.x()), 0.5 * (p.y() + q.y()));
    }
    return it->second;
  };
  for (const auto& t : in.triangles) {
    const int m01 = mid(t[0], t[1]);
    const int m12 = mid(t[1], t[2]);
    const int m20 = mid(t[2], t[0]);
    out.triangles.push_back({t[0], m01, m20});
    out.triangles.push_back({m01, t[1], m12});
    out.triangles.push_back({m20, m12, t[2]});
    out.triangles.push_back({m01, m12, m20});
  }
  return out;
}

Triangulation map_to_disk(const ReferenceMesh& ref, int level) {
  std::vector<Point2> mapped;
  mapped.reserve(ref.vertices.size());
  for (const auto& z : ref.vertices) mapped.push_back(correction_map(z));
  return Triangulation(std::move(mapped), ref.triangles, level, ref.vertices);
}

}  // namespace

Triangulation::Triangulation(std::vector<Point2> vertices,
                             std::vector<std::array<int, 3>> triangles, int level,
                             std::vector<Point2> reference_vertices)
    : vertices_(std::move(vertices)),
      triangles_(std::move(triangles)),
      reference_(std::move(reference_vertices)),
      level_(level) {
  const int nv = static_cast<int>(vertices_.size());
  for (auto& t : triangles_) {
    for (int i : t) {
      if (i < 0 || i >= nv) throw ArgumentError("triangle references a missing vertex");
    }
    const double a = signed_area(vertices_[t[0]], vertices_[t[1]], vertices_[t[2]]);
    if (a == 0.0) throw ArgumentError("degenerate triangle");
    if (a < 0.0) std::swap(t[1], t[2]);
  }

  std::map<std::pair<int, int>, int> side_of;
  triangle_sides_.resize(triangles_.size());
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    for (int k = 0; k < 3; ++k) {
      const int a = triangles_[t][(k + 1) % 3];
      const int b = triangles_[t][(k + 2) % 3];
      auto [it, inserted] = side_of.try_emplace(std::minmax(a, b), static_cast<int>(sides_.size()));
      if (inserted) {
        Side s;
        s.endpoints = {a, b};
        s.triangles = {static_cast<int>(t), -1};
        const Vec2 d = vertices_[b] - vertices_[a];
        s.length = d.norm();
        s.unit_normal = Vec2(d.y(), -d.x()) / s.length;
        sides_.push_back(s);
      } else {
        Side& s = sides_[it->second];
        if (s.triangles[1] >= 0) throw ArgumentError("side shared by more than two triangles");
        s.triangles[1] = static_cast<int>(t);
      }
      triangle_sides_[t][k] = it->second;
    }
  }

  boundary_.assign(vertices_.size(), false);
  vertex_triangles_.resize(vertices_.size());
  vertex_boundary_sides_.resize(vertices_.size());
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    for (int v : triangles_[t]) vertex_triangles_[v].push_back(static_cast<int>(t));
  }
  for (std::size_t s = 0; s < sides_.size(); ++s) {
    Side& side = sides_[s];
    side.is_boundary = side.triangles[1] < 0;
    if (!side.is_boundary) continue;
    for (int v : side.endpoints) {
      boundary_[v] = true;
      vertex_boundary_sides_[v].push_back(static_cast<int>(s));
    }
  }
}

double Triangulation::side_sign(std::size_t t, int k) const {
  return sides_[triangle_sides_[t][k]].triangles[0] == static_cast<int>(t) ? 1.0 : -1.0;
}

std::array<Point2, 3> Triangulation::corners(std::size_t t) const {
  const auto& tri = triangles_[t];
  return {vertices_[tri[0]], vertices_[tri[1]], vertices_[tri[2]]};
}

double Triangulation::area(std::size_t t) const {
  const auto c = corners(t);
  return signed_area(c[0], c[1], c[2]);
}

double Triangulation::diameter(std::size_t t) const {
  const auto c = corners(t);
  return std::max({(c[1] - c[0]).norm(), (c[2] - c[1]).norm(), (c[0] - c[2]).norm()});
}

double Triangulation::total_area() const {
  double sum = 0.0;
  for (std::size_t t = 0; t < triangles_.size(); ++t) sum += area(t);
  return sum;
}

MeshStats Triangulation::stats() const {
  MeshStats s;
  s.h_min = std::numeric_limits<double>::infinity();
  s.min_angle = std::numbers::pi;
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    const auto c = corners(t);
    double perimeter = 0.0;
    for (int k = 0; k < 3; ++k) {
      const Vec2 e1 = c[(k + 1) % 3] - c[k];
      const Vec2 e2 = c[(k + 2) % 3] - c[k];
      perimeter += e1.norm();
      const double cosine = std::clamp(e1.dot(e2) / (e1.norm() * e2.norm()), -1.0, 1.0);
      s.min_angle = std::min(s.min_angle, std::acos(cosine));
    }
    const double h = diameter(t);
    const double inradius = 2.0 * area(t) / perimeter;
    s.h_max = std::max(s.h_max, h);
    s.h_min = std::min(s.h_min, h);
    s.shape_regularity = std::max(s.shape_regularity, h / inradius);
  }
  return s;
}

Point2 correction_map(const Point2& z) {
  const double norm2 = z.norm();
  if (norm2 == 0.0) return Point2::Zero();
  const double norm_inf = z.cwiseAbs().maxCoeff();
  const double factor = std::numbers::sqrt2 * norm_inf / norm2;
  return Point2(factor * z.x(), factor * z.y());
}

Triangulation build_disk_mesh(int level, int max_level) {
  if (level < 0) throw ArgumentError("mesh level must be nonnegative");
  if (level > max_level) {
    throw CapacityError(fmt::format("mesh level {} exceeds the maximum {}", level, max_level));
  }
  ReferenceMesh ref = base_square();
  for (int l = 0; l < level; ++l) ref = red_refine(ref);
  return map_to_disk(ref, level);
}

MeshPtr make_disk_mesh(int level, int max_level) {
  return std::make_shared<const Triangulation>(build_disk_mesh(level, max_level));
}

Triangulation refine_reference(const Triangulation& mesh) {
  if (mesh.reference_vertices().size() != mesh.num_vertices()) {
    throw ArgumentError("mesh carries no reference coordinates");
  }
  return map_to_disk(red_refine({mesh.reference_vertices(), mesh.triangles()}), mesh.level() + 1);
}

std::array<double, 3> barycentric(const Triangulation& mesh, std::size_t t, const Point2& x) {
  const auto c = mesh.corners(t);
  const double total = signed_area(c[0], c[1], c[2]);
  const double l1 = signed_area(c[0], x, c[2]) / total;
  const double l2 = signed_area(c[0], c[1], x) / total;
  return {1.0 - l1 - l2, l1, l2};
}

PointLocation locate_point(const Triangulation& mesh, const Point2& x) {
  constexpr double tol = 1e-12;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto c = mesh.corners(t);
    const double lo_x = std::min({c[0].x(), c[1].x(), c[2].x()}) - tol;
    const double hi_x = std::max({c[0].x(), c[1].x(), c[2].x()}) + tol;
    const double lo_y = std::min({c[0].y(), c[1].y(), c[2].y()}) - tol;
    const double hi_y = std::max({c[0].y(), c[1].y(), c[2].y()}) + tol;
    if (x.x() < lo_x || x.x() > hi_x || x.y() < lo_y || x.y() > hi_y) continue;
    const auto b = barycentric(mesh, t, x);
    if (b[0] >= -tol && b[1] >= -tol && b[2] >= -tol) return {static_cast<int>(t), b};
  }
  throw NotFoundError(fmt::format("point ({}, {}) lies outside the mesh", x.x(), x.y()));
}

P1Field::P1Field(MeshPtr mesh, Eigen::VectorXd values)
    : mesh_(std::move(mesh)), values_(std::move(values)) {
  if (static_cast<std::size_t>(values_.size()) != mesh_->num_vertices()) {
    throw ArgumentError(fmt::format("expected {} vertex values, got {}", mesh_->num_vertices(),
                                    values_.size()));
  }
}

double P1Field::value_in(std::size_t t, const std::array<double, 3>& bary) const {
  const auto& tri = mesh_->triangles()[t];
  return bary[0] * values_[tri[0]] + bary[1] * values_[tri[1]] + bary[2] * values_[tri[2]];
}

Vec2 P1Field::gradient_in(std::size_t t) const {
  const auto c = mesh_->corners(t);
  const auto& tri = mesh_->triangles()[t];
  const double twice_area = 2.0 * mesh_->area(t);
  Vec2 g = Vec2::Zero();
  for (int k = 0; k < 3; ++k) {
    const Vec2 e = c[(k + 2) % 3] - c[(k + 1) % 3];
    g += values_[tri[k]] * Vec2(-e.y(), e.x()) / twice_area;
  }
  return g;
}

double P1Field::operator()(const Point2& x) const {
  const auto loc = locate_point(*mesh_, x);
  return value_in(static_cast<std::size_t>(loc.triangle), loc.barycentric);
}

P1Field p1_interpolate(MeshPtr mesh, const Eigen::VectorXd& values_at_vertices) {
  return P1Field(std::move(mesh), values_at_vertices);
}

P1Field p1_interpolate(MeshPtr mesh, const ScalarField& v) {
  Eigen::VectorXd values(static_cast<Eigen::Index>(mesh->num_vertices()));
  for (std::size_t i = 0; i < mesh->num_vertices(); ++i) values[i] = v(mesh->vertices()[i]);
  return P1Field(std::move(mesh), std::move(values));
}

std::string mesh_to_text(const Triangulation& mesh) {
  std::string out = fmt::format("{} {} {}\n", mesh.num_vertices(), mesh.num_triangles(),
                                mesh.num_sides());
  for (std::size_t i = 0; i < mesh.num_vertices(); ++i) {
    const auto& v = mesh.vertices()[i];
    out += fmt::format("{:.17g} {:.17g} {}\n", v.x(), v.y(),
                       mesh.boundary_vertex_flags()[i] ? 1 : 0);
  }
  for (const auto& t : mesh.triangles()) out += fmt::format("{} {} {}\n", t[0], t[1], t[2]);
  for (const auto& s : mesh.sides()) {
    out += fmt::format("{} {} {} {} {:.17g} {:.17g}\n", s.endpoints[0], s.endpoints[1],
                       s.triangles[0], s.triangles[1], s.unit_normal.x(), s.unit_normal.y());
  }
  return out;
}

}  // namespace plate
