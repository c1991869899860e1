#pragma once

#include "plate/common.hpp"

#include <array>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace plate {

/// Edge of the triangulation. The normal is fixed once: outward on the
/// boundary, otherwise pointing out of triangles[0] into triangles[1]
/// (triangles[0] is always the lower index).
struct Side {
  std::array<int, 2> endpoints{};
  std::array<int, 2> triangles{-1, -1};
  Vec2 unit_normal = Vec2::Zero();
  double length = 0.0;
  bool is_boundary = false;

  [[nodiscard]] Vec2 tangent() const { return Vec2(-unit_normal.y(), unit_normal.x()); }
};

struct MeshStats {
  double h_max = 0.0;
  double h_min = 0.0;
  double min_angle = 0.0;         // radians
  double shape_regularity = 0.0;  // max diameter / inradius
};

/// Conforming triangulation of a polygonal domain. Immutable once built.
class Triangulation {
 public:
  /// Generic constructor; sides, adjacency and boundary flags are derived.
  /// Triangles are reoriented counterclockwise if necessary.
  Triangulation(std::vector<Point2> vertices, std::vector<std::array<int, 3>> triangles,
                int level = 0, std::vector<Point2> reference_vertices = {});

  [[nodiscard]] const std::vector<Point2>& vertices() const { return vertices_; }
  [[nodiscard]] const std::vector<std::array<int, 3>>& triangles() const { return triangles_; }
  [[nodiscard]] const std::vector<Side>& sides() const { return sides_; }
  [[nodiscard]] const std::vector<bool>& boundary_vertex_flags() const { return boundary_; }
  [[nodiscard]] const std::vector<Point2>& reference_vertices() const { return reference_; }
  [[nodiscard]] int level() const { return level_; }

  [[nodiscard]] std::size_t num_vertices() const { return vertices_.size(); }
  [[nodiscard]] std::size_t num_triangles() const { return triangles_.size(); }
  [[nodiscard]] std::size_t num_sides() const { return sides_.size(); }

  /// Side index of local side k of triangle t; local side k is opposite
  /// local vertex k and runs from vertex k+1 to k+2.
  [[nodiscard]] int triangle_side(std::size_t t, int k) const { return triangle_sides_[t][k]; }
  /// +1 if the global side normal is the outward normal of t, else -1.
  [[nodiscard]] double side_sign(std::size_t t, int k) const;
  [[nodiscard]] const std::vector<int>& vertex_triangles(std::size_t v) const {
    return vertex_triangles_[v];
  }
  /// Boundary sides incident to vertex v (empty for interior vertices).
  [[nodiscard]] const std::vector<int>& vertex_boundary_sides(std::size_t v) const {
    return vertex_boundary_sides_[v];
  }

  [[nodiscard]] std::array<Point2, 3> corners(std::size_t t) const;
  [[nodiscard]] double area(std::size_t t) const;
  [[nodiscard]] double diameter(std::size_t t) const;
  [[nodiscard]] double total_area() const;
  [[nodiscard]] MeshStats stats() const;

 private:
  std::vector<Point2> vertices_;
  std::vector<std::array<int, 3>> triangles_;
  std::vector<Side> sides_;
  std::vector<std::array<int, 3>> triangle_sides_;
  std::vector<bool> boundary_;
  std::vector<std::vector<int>> vertex_triangles_;
  std::vector<std::vector<int>> vertex_boundary_sides_;
  std::vector<Point2> reference_;
  int level_ = 0;
};

using MeshPtr = std::shared_ptr<const Triangulation>;

inline constexpr int kMaxDiskLevel = 8;

/// z -> sqrt(2) |z|_inf z / |z|_2, with the origin fixed. Maps the square
/// [-1/sqrt2, 1/sqrt2]^2 onto the closed unit disk.
Point2 correction_map(const Point2& z);

/// Square mesh with corners (+-1/sqrt2, +-1/sqrt2) fanned around the origin,
/// red-refined `level` times in square coordinates, then mapped to the disk.
Triangulation build_disk_mesh(int level, int max_level = kMaxDiskLevel);
MeshPtr make_disk_mesh(int level, int max_level = kMaxDiskLevel);

/// One red refinement of `mesh` carried out on its reference (square)
/// coordinates, followed by the correction map.
Triangulation refine_reference(const Triangulation& mesh);

struct PointLocation {
  int triangle = -1;
  std::array<double, 3> barycentric{};
};

std::array<double, 3> barycentric(const Triangulation& mesh, std::size_t t, const Point2& x);

/// Lowest-index triangle containing x (tolerance 1e-12 on barycentrics).
PointLocation locate_point(const Triangulation& mesh, const Point2& x);

/// Continuous piecewise linear field given by vertex values.
class P1Field {
 public:
  P1Field(MeshPtr mesh, Eigen::VectorXd values);

  [[nodiscard]] double operator()(const Point2& x) const;
  [[nodiscard]] double value_in(std::size_t t, const std::array<double, 3>& bary) const;
  [[nodiscard]] Vec2 gradient_in(std::size_t t) const;
  [[nodiscard]] const Eigen::VectorXd& values() const { return values_; }
  [[nodiscard]] const Triangulation& mesh() const { return *mesh_; }

 private:
  MeshPtr mesh_;
  Eigen::VectorXd values_;
};

P1Field p1_interpolate(MeshPtr mesh, const Eigen::VectorXd& values_at_vertices);
P1Field p1_interpolate(MeshPtr mesh, const ScalarField& v);

/// Plain-text mesh format: "nv nt ns", vertex lines "x y flag", triangle
/// lines "i j k", side lines "i j t1 t2 nx ny" with t2 = -1 on the boundary.
std::string mesh_to_text(const Triangulation& mesh);

}  // namespace plate
