#include "plate/polyquad.hpp"
#include "plate/splitting.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

using namespace plate;

namespace {

const ScalarField kOne = [](const Point2&) { return 1.0; };

double u_infinity(const Point2& x) {
  const double r2 = x.squaredNorm();
  return (3.0 - 4.0 * r2 + r2 * r2) / 64.0;
}

}  // namespace

TEST(SplittingAssembly, LoadSumsToArea) {
  const Triangulation mesh = build_disk_mesh(2);
  const Eigen::VectorXd b = splitting::p1_load(mesh, kOne);
  EXPECT_NEAR(b.sum(), mesh.total_area(), 1e-13);
  const Eigen::VectorXd bx = splitting::p1_load(mesh, [](const Point2& x) { return x.x() * x.x(); });
  // sum_i phi_i = 1, so the entries add up to int x^2.
  const auto m = splitting::assemble_p1(mesh);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(mesh.num_vertices()));
  double exact = 0.0;
  const QuadRule& rule = triangle_quadrature(4);
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const MappedRule q = map_rule(mesh, t, rule);
    for (std::size_t k = 0; k < q.points.size(); ++k) exact += q.weights[k] * q.points[k].x() * q.points[k].x();
  }
  EXPECT_NEAR(bx.sum(), exact, 1e-14);
  EXPECT_NEAR(ones.dot(m.mass * ones), mesh.total_area(), 1e-13);
}

TEST(SplittingSolve, OriginValues) {
  const MeshPtr mesh = make_disk_mesh(4);
  const splitting::SplittingResult r = splitting::solve_splitting(mesh, kOne);
  EXPECT_NEAR(r.w.coefficients[0], 0.25, 0.02 * 0.25);
  EXPECT_NEAR(r.u.coefficients[0], 3.0 / 64.0, 0.02 * 3.0 / 64.0);
  for (std::size_t v = 0; v < mesh->num_vertices(); ++v) {
    if (!mesh->boundary_vertex_flags()[v]) continue;
    EXPECT_EQ(r.u.coefficients[static_cast<Eigen::Index>(v)], 0.0);
    EXPECT_EQ(r.w.coefficients[static_cast<Eigen::Index>(v)], 0.0);
  }
}

TEST(SplittingSolve, ZeroLoad) {
  const splitting::SplittingResult r =
      splitting::solve_splitting(make_disk_mesh(2), [](const Point2&) { return 0.0; });
  EXPECT_EQ(r.u.coefficients.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(r.w.coefficients.cwiseAbs().maxCoeff(), 0.0);
}

TEST(SplittingSolve, L2RateTowardLimit) {
  std::vector<double> e;
  for (int level = 2; level <= 5; ++level) {
    const MeshPtr mesh = make_disk_mesh(level);
    const splitting::SplittingResult r = splitting::solve_splitting(mesh, kOne);
    e.push_back(splitting::l2_interpolation_error(*mesh, r.u.coefficients, u_infinity));
  }
  for (std::size_t k = 1; k < e.size(); ++k) EXPECT_LT(e[k], e[k - 1]);
  const double rate = oracle::log2_ratio(e[e.size() - 2], e.back());
  EXPECT_GE(rate, 1.7);
  EXPECT_LE(rate, 2.3);
}

TEST(SplittingSolve, MatchesTwoIndependentSolves) {
  const MeshPtr mesh = make_disk_mesh(3);
  const splitting::SplittingResult r = splitting::solve_splitting(mesh, kOne);
  const auto m = splitting::assemble_p1(*mesh);
  LinearConstraintSet c(m.stiffness.rows());
  for (std::size_t v = 0; v < mesh->num_vertices(); ++v) {
    if (mesh->boundary_vertex_flags()[v]) c.fix(static_cast<Eigen::Index>(v));
  }
  const ReducedSystem first = reduce(m.stiffness, splitting::p1_load(*mesh, kOne), c);
  const Eigen::VectorXd w = first.expand(solve(first.matrix, first.rhs).x);
  const ReducedSystem second = reduce(m.stiffness, m.mass * w, c);
  const Eigen::VectorXd u = second.expand(solve(second.matrix, second.rhs).x);
  EXPECT_LE((w - r.w.coefficients).cwiseAbs().maxCoeff(), 1e-13);
  EXPECT_LE((u - r.u.coefficients).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(SplittingSolve, InterpolationErrorOfExactNodalValuesVanishes) {
  const Triangulation mesh = build_disk_mesh(2);
  Eigen::VectorXd v(static_cast<Eigen::Index>(mesh.num_vertices()));
  for (std::size_t i = 0; i < mesh.num_vertices(); ++i) v[static_cast<Eigen::Index>(i)] = u_infinity(mesh.vertices()[i]);
  EXPECT_EQ(splitting::l2_interpolation_error(mesh, v, u_infinity), 0.0);
  EXPECT_THROW(splitting::l2_interpolation_error(mesh, v.head(3), u_infinity), ArgumentError);
}
