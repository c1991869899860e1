#include "plate/dkt.hpp"

#include <Eigen/LU>
#include <fmt/format.h>

namespace plate::dkt {

namespace {

void check_sigma(double sigma) {
  if (!(sigma >= 0.0 && sigma < 1.0)) {
    throw ArgumentError(fmt::format("Poisson ratio {} outside [0, 1)", sigma));
  }
}

// Gradients of the barycentric coordinates of triangle t.
std::array<Vec2, 3> barycentric_gradients(const Triangulation& mesh, std::size_t t) {
  const auto z = mesh.corners(t);
  const double twice_area = 2.0 * mesh.area(t);
  std::array<Vec2, 3> g;
  for (int k = 0; k < 3; ++k) {
    const Vec2 e = z[(k + 2) % 3] - z[(k + 1) % 3];
    g[k] = Vec2(-e.y(), e.x()) / twice_area;
  }
  return g;
}

Eigen::VectorXd local_coefficients(const DktSpace& space, const Eigen::VectorXd& c, std::size_t t) {
  const auto dofs = space.element_dofs(t);
  Eigen::VectorXd local(kLocalDofs);
  for (int i = 0; i < kLocalDofs; ++i) local[i] = c[dofs[i]];
  return local;
}

}  // namespace

std::array<Eigen::Index, kLocalDofs> DktSpace::element_dofs(std::size_t t) const {
  std::array<Eigen::Index, kLocalDofs> dofs{};
  const auto& tri = mesh_->triangles()[t];
  for (int i = 0; i < 3; ++i) {
    for (int k = 0; k < 3; ++k) dofs[3 * i + k] = dof(static_cast<std::size_t>(tri[i]), k);
  }
  return dofs;
}

GradientMap gradient_map(const Triangulation& mesh, std::size_t t) {
  const auto z = mesh.corners(t);
  GradientMap g = GradientMap::Zero();
  for (int i = 0; i < 3; ++i) {
    g(2 * i, 3 * i + 1) = 1.0;
    g(2 * i + 1, 3 * i + 2) = 1.0;
  }
  for (int k = 0; k < 3; ++k) {
    const int a = (k + 1) % 3;
    const int b = (k + 2) % 3;
    const Vec2 d = z[b] - z[a];
    const double length = d.norm();
    if (!(length > 0.0)) throw ElementQualityError(fmt::format("degenerate side in triangle {}", t));
    const Vec2 tangent = d / length;
    // theta(m) = (g_a + g_b)/2 + t [ 3/(2L) (v_b - v_a) - 3/4 (g_a + g_b).t ]
    for (int c = 0; c < 2; ++c) {
      const int row = 2 * (3 + k) + c;
      g(row, 3 * b) += 1.5 / length * tangent[c];
      g(row, 3 * a) -= 1.5 / length * tangent[c];
      for (int dd = 0; dd < 2; ++dd) {
        const double entry = (c == dd ? 0.5 : 0.0) - 0.75 * tangent[c] * tangent[dd];
        g(row, 3 * a + 1 + dd) += entry;
        g(row, 3 * b + 1 + dd) += entry;
      }
    }
  }
  return g;
}

P2Eval p2_eval(const Triangulation& mesh, std::size_t t, const Point2& x) {
  const auto l = barycentric(mesh, t, x);
  const auto gl = barycentric_gradients(mesh, t);
  P2Eval e;
  for (int i = 0; i < 3; ++i) {
    e.value[i] = l[i] * (2.0 * l[i] - 1.0);
    e.grad.col(i) = (4.0 * l[i] - 1.0) * gl[i];
  }
  for (int k = 0; k < 3; ++k) {
    const int a = (k + 1) % 3;
    const int b = (k + 2) % 3;
    e.value[3 + k] = 4.0 * l[a] * l[b];
    e.grad.col(3 + k) = 4.0 * (l[a] * gl[b] + l[b] * gl[a]);
  }
  return e;
}

PolyBasis scalar_basis(const Triangulation& mesh, std::size_t t) {
  const auto z = mesh.corners(t);
  const double h = mesh.diameter(t);
  const Point2 c = (z[0] + z[1] + z[2]) / 3.0;
  MonomialBasis monomials(3, c, h);
  Eigen::MatrixXd v(10, 10);
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(10, kLocalDofs);
  Eigen::RowVectorXd condensation = monomials.scaled_derivative(c, 0, 0).transpose();
  for (int i = 0; i < 3; ++i) {
    v.row(3 * i) = monomials.scaled_derivative(z[i], 0, 0).transpose();
    v.row(3 * i + 1) = monomials.scaled_derivative(z[i], 1, 0).transpose();
    v.row(3 * i + 2) = monomials.scaled_derivative(z[i], 0, 1).transpose();
    rhs(3 * i, 3 * i) = 1.0;
    rhs(3 * i + 1, 3 * i + 1) = h;
    rhs(3 * i + 2, 3 * i + 2) = h;
    const Vec2 d = (c - z[i]) / h;
    condensation -= v.row(3 * i) / 3.0 + (d.x() * v.row(3 * i + 1) + d.y() * v.row(3 * i + 2)) / 6.0;
  }
  v.row(9) = condensation;
  Eigen::MatrixXd coefficients = v.partialPivLu().solve(rhs);
  return PolyBasis(std::move(monomials), std::move(coefficients));
}

PlateSystem assemble_system(const DktSpace& space, double sigma, const ScalarField& f,
                            const AssemblyOptions& options) {
  check_sigma(sigma);
  const Triangulation& mesh = space.mesh();
  const QuadRule& rule = triangle_quadrature(options.volume_degree);
  const std::size_t nt = mesh.num_triangles();
  std::vector<Eigen::Matrix<double, kLocalDofs, kLocalDofs>> stiffness(nt);
  std::vector<Eigen::Matrix<double, kLocalDofs, 1>> load(nt);
  parallel_for(nt, [&](std::size_t t) {
    const MappedRule q = map_rule(mesh, t, rule);
    const PolyBasis scalar = scalar_basis(mesh, t);
    Eigen::Matrix<double, kGradientDofs, kGradientDofs> k =
        Eigen::Matrix<double, kGradientDofs, kGradientDofs>::Zero();
    load[t].setZero();
    for (std::size_t p = 0; p < q.points.size(); ++p) {
      const P2Eval e = p2_eval(mesh, t, q.points[p]);
      // Rows: d1 theta_1, d2 theta_1, d1 theta_2, d2 theta_2.
      Eigen::Matrix<double, 4, kGradientDofs> jac = Eigen::Matrix<double, 4, kGradientDofs>::Zero();
      for (int j = 0; j < 6; ++j) {
        jac(0, 2 * j) = e.grad(0, j);
        jac(1, 2 * j) = e.grad(1, j);
        jac(2, 2 * j + 1) = e.grad(0, j);
        jac(3, 2 * j + 1) = e.grad(1, j);
      }
      const Eigen::Matrix<double, 1, kGradientDofs> div = jac.row(0) + jac.row(3);
      k.noalias() += q.weights[p] * (sigma * div.transpose() * div +
                                     (1.0 - sigma) * jac.transpose() * jac);
      load[t] += q.weights[p] * f(q.points[p]) * scalar.eval(q.points[p]).value;
    }
    const GradientMap g = gradient_map(mesh, t);
    stiffness[t] = g.transpose() * k * g;
  });

  PlateSystem sys;
  const Eigen::Index n = space.num_dofs();
  TripletList triplets(n);
  triplets.reserve(nt * kLocalDofs * kLocalDofs);
  sys.rhs = Eigen::VectorXd::Zero(n);
  for (std::size_t t = 0; t < nt; ++t) {
    const auto dofs = space.element_dofs(t);
    triplets.add_block(dofs, stiffness[t]);
    for (int i = 0; i < kLocalDofs; ++i) sys.rhs[dofs[i]] += load[t][i];
  }
  sys.energy = assemble(triplets);
  sys.matrix = sys.energy;
  sys.constraints = LinearConstraintSet(n);
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
    if (mesh.boundary_vertex_flags()[v]) sys.constraints.fix(space.dof(v, 0));
  }
  return sys;
}

Eigen::VectorXd interpolate(const DktSpace& space, const AnalyticField& v) {
  const Triangulation& mesh = space.mesh();
  Eigen::VectorXd c(space.num_dofs());
  for (std::size_t i = 0; i < mesh.num_vertices(); ++i) {
    const Jet j = v(mesh.vertices()[i]);
    c.segment<3>(space.dof(i, 0)) << j.value, j.grad.x(), j.grad.y();
  }
  return c;
}

double evaluate(const DktSpace& space, const Eigen::VectorXd& coefficients, const Point2& x) {
  const auto loc = locate_point(space.mesh(), x);
  const auto t = static_cast<std::size_t>(loc.triangle);
  return scalar_basis(space.mesh(), t).combine(x, local_coefficients(space, coefficients, t)).value;
}

GradientEval discrete_gradient(const DktSpace& space, const Eigen::VectorXd& coefficients,
                               std::size_t t, const Point2& x) {
  const Eigen::Matrix<double, kGradientDofs, 1> theta =
      gradient_map(space.mesh(), t) * local_coefficients(space, coefficients, t);
  const P2Eval e = p2_eval(space.mesh(), t, x);
  GradientEval out;
  out.theta.setZero();
  out.jacobian.setZero();
  for (int j = 0; j < 6; ++j) {
    const Vec2 node(theta[2 * j], theta[2 * j + 1]);
    out.theta += e.value[j] * node;
    out.jacobian += node * e.grad.col(j).transpose();
  }
  return out;
}

ConsistencyErrors consistency_errors(const DktSpace& space, const Eigen::VectorXd& coefficients,
                                     const AnalyticField& v, int volume_degree) {
  const Triangulation& mesh = space.mesh();
  const QuadRule& rule = triangle_quadrature(volume_degree);
  std::vector<Eigen::Vector2d> parts(mesh.num_triangles());
  parallel_for(mesh.num_triangles(), [&](std::size_t t) {
    const MappedRule q = map_rule(mesh, t, rule);
    Eigen::Vector2d sum = Eigen::Vector2d::Zero();
    for (std::size_t p = 0; p < q.points.size(); ++p) {
      const GradientEval g = discrete_gradient(space, coefficients, t, q.points[p]);
      const Jet exact = v(q.points[p]);
      sum[0] += q.weights[p] * (g.theta - exact.grad).squaredNorm();
      sum[1] += q.weights[p] * (g.jacobian - exact.hess).squaredNorm();
    }
    parts[t] = sum;
  });
  Eigen::Vector2d total = Eigen::Vector2d::Zero();
  for (const auto& p : parts) total += p;
  return {std::sqrt(total[0]), std::sqrt(total[1])};
}

Solution solve(const DktSpace& space, double sigma, const ScalarField& f,
               const AssemblyOptions& options) {
  return solve_system(assemble_system(space, sigma, f, options));
}

}  // namespace plate::dkt
