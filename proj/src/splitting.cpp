#include "plate/splitting.hpp"

#include "plate/polyquad.hpp"

#include <fmt/format.h>

#include <array>

namespace plate::splitting {

namespace {

LinearConstraintSet dirichlet(const Triangulation& mesh) {
  LinearConstraintSet c(static_cast<Eigen::Index>(mesh.num_vertices()));
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
    if (mesh.boundary_vertex_flags()[v]) c.fix(static_cast<Eigen::Index>(v));
  }
  return c;
}

std::array<Eigen::Index, 3> vertex_dofs(const Triangulation& mesh, std::size_t t) {
  const auto& tri = mesh.triangles()[t];
  return {tri[0], tri[1], tri[2]};
}

}  // namespace

P1Matrices assemble_p1(const Triangulation& mesh, int mass_degree) {
  const QuadRule& rule = triangle_quadrature(mass_degree);
  const auto n = static_cast<Eigen::Index>(mesh.num_vertices());
  TripletList k(n);
  TripletList m(n);
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto z = mesh.corners(t);
    const double area = mesh.area(t);
    Eigen::Matrix<double, 2, 3> g;
    for (int i = 0; i < 3; ++i) {
      const Vec2 e = z[(i + 2) % 3] - z[(i + 1) % 3];
      g.col(i) = Vec2(-e.y(), e.x()) / (2.0 * area);
    }
    Eigen::Matrix3d mass = Eigen::Matrix3d::Zero();
    for (std::size_t p = 0; p < rule.size(); ++p) {
      const Eigen::Vector3d l(rule.points[p][0], rule.points[p][1], rule.points[p][2]);
      mass += rule.weights[p] * area * l * l.transpose();
    }
    const auto dofs = vertex_dofs(mesh, t);
    k.add_block(dofs, area * g.transpose() * g);
    m.add_block(dofs, mass);
  }
  return {assemble(k), assemble(m)};
}

Eigen::VectorXd p1_load(const Triangulation& mesh, const ScalarField& f, int degree) {
  const QuadRule& rule = triangle_quadrature(degree);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mesh.num_vertices()));
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const MappedRule r = map_rule(mesh, t, rule);
    const auto dofs = vertex_dofs(mesh, t);
    for (std::size_t p = 0; p < r.points.size(); ++p) {
      const double fw = r.weights[p] * f(r.points[p]);
      for (int i = 0; i < 3; ++i) b[dofs[i]] += fw * rule.points[p][i];
    }
  }
  return b;
}

SplittingResult solve_splitting(const MeshPtr& mesh, const ScalarField& f, SolveOptions options) {
  const P1Matrices mats = assemble_p1(*mesh);
  const LinearConstraintSet constraints = dirichlet(*mesh);
  const Eigen::VectorXd load = p1_load(*mesh, f);
  const ReducedSystem first = reduce(mats.stiffness, load, constraints);
  const SpdSolver solver(first.matrix, options);

  SplittingResult out;
  out.w.coefficients = first.expand(solver.solve(first.rhs, &out.w.report));
  out.w.report.condition_estimate = solver.condition_estimate();
  out.w.energy = 0.5 * quadratic_form(mats.stiffness, out.w.coefficients) -
                 load.dot(out.w.coefficients);

  const Eigen::VectorXd second_load = mats.mass * out.w.coefficients;
  const Eigen::VectorXd reduced_rhs = first.expansion.transpose() * second_load;
  out.u.coefficients = first.expand(solver.solve(reduced_rhs, &out.u.report));
  out.u.report.condition_estimate = out.w.report.condition_estimate;
  out.u.energy = 0.5 * quadratic_form(mats.stiffness, out.u.coefficients) -
                 second_load.dot(out.u.coefficients);
  return out;
}

double l2_interpolation_error(const Triangulation& mesh, const Eigen::VectorXd& values,
                              const ScalarField& v) {
  if (values.size() != static_cast<Eigen::Index>(mesh.num_vertices())) {
    throw ArgumentError(fmt::format("{} values for {} vertices", values.size(), mesh.num_vertices()));
  }
  const P1Matrices mats = assemble_p1(mesh);
  Eigen::VectorXd e = values;
  for (std::size_t i = 0; i < mesh.num_vertices(); ++i) {
    e[static_cast<Eigen::Index>(i)] -= v(mesh.vertices()[i]);
  }
  return std::sqrt(std::max(0.0, quadratic_form(mats.mass, e)));
}

}  // namespace plate::splitting
