#include "plate/argyris.hpp"

#include <Eigen/LU>
#include <fmt/format.h>

#include <cmath>

namespace plate::argyris {

namespace {

constexpr std::array<std::array<int, 2>, 6> kVertexDerivatives = {
    {{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}}};

void check_sigma(double sigma) {
  if (!(sigma >= 0.0 && sigma < 1.0)) {
    throw ArgumentError(fmt::format("Poisson ratio {} outside [0, 1)", sigma));
  }
}

struct ElementContribution {
  Eigen::MatrixXd energy;
  Eigen::MatrixXd penalty;
  Eigen::VectorXd load;
};

}  // namespace

std::string BcMode::name() const {
  switch (kind) {
    case Kind::Full: return "full";
    case Kind::NodalReduced: return "nodal";
    case Kind::Penalty: return "penalty";
    case Kind::PenaltyVertexQuadrature: return "penalty-vertex";
  }
  return "unknown";
}

std::array<Eigen::Index, kLocalDofs> ArgyrisSpace::element_dofs(std::size_t t) const {
  std::array<Eigen::Index, kLocalDofs> dofs{};
  const auto& tri = mesh_->triangles()[t];
  for (int i = 0; i < 3; ++i) {
    for (int k = 0; k < 6; ++k) dofs[6 * i + k] = vertex_dof(static_cast<std::size_t>(tri[i]), k);
  }
  for (int k = 0; k < 3; ++k) {
    dofs[18 + k] = side_dof(static_cast<std::size_t>(mesh_->triangle_side(t, k)));
  }
  return dofs;
}

ElementBasis element_basis(const Triangulation& mesh, std::size_t t) {
  const auto z = mesh.corners(t);
  const double h = mesh.diameter(t);
  const Point2 centroid = (z[0] + z[1] + z[2]) / 3.0;
  MonomialBasis monomials(5, centroid, h);

  // Functionals in scaled form: derivatives of order |a| are multiplied by
  // h^|a|, which makes the Vandermonde matrix entries O(1).
  Eigen::MatrixXd vandermonde(kLocalDofs, kLocalDofs);
  Eigen::VectorXd scaling(kLocalDofs);
  for (int i = 0; i < 3; ++i) {
    for (int k = 0; k < 6; ++k) {
      const auto [a, b] = kVertexDerivatives[k];
      vandermonde.row(6 * i + k) = monomials.scaled_derivative(z[i], a, b).transpose();
      scaling[6 * i + k] = std::pow(h, a + b);
    }
  }
  for (int k = 0; k < 3; ++k) {
    const Side& side = mesh.sides()[mesh.triangle_side(t, k)];
    const Point2 mid = 0.5 * (z[(k + 1) % 3] + z[(k + 2) % 3]);
    vandermonde.row(18 + k) = (side.unit_normal.x() * monomials.scaled_derivative(mid, 1, 0) +
                               side.unit_normal.y() * monomials.scaled_derivative(mid, 0, 1))
                                  .transpose();
    scaling[18 + k] = h;
  }

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(vandermonde);
  const double rcond = lu.rcond();
  const double condition = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
  if (!(condition <= kMaxVandermondeCondition)) {
    throw ElementQualityError(
        fmt::format("Argyris Vandermonde matrix of triangle {} has condition {:.3g}", t, condition));
  }
  // V_phys = diag(1/scaling) V_scaled, so V_phys^{-1} = V_scaled^{-1} diag(scaling).
  Eigen::MatrixXd coefficients = lu.solve(Eigen::MatrixXd(scaling.asDiagonal()));
  return {PolyBasis(std::move(monomials), std::move(coefficients)), scaling, condition};
}

Eigen::MatrixXd apply_functionals(const Triangulation& mesh, std::size_t t, const PolyBasis& basis) {
  const auto z = mesh.corners(t);
  Eigen::MatrixXd out(kLocalDofs, basis.size());
  for (int i = 0; i < 3; ++i) {
    const BasisEval e = basis.eval(z[i]);
    out.row(6 * i + 0) = e.value.transpose();
    out.row(6 * i + 1) = e.grad.row(0);
    out.row(6 * i + 2) = e.grad.row(1);
    out.row(6 * i + 3) = e.hess.row(0);
    out.row(6 * i + 4) = e.hess.row(1);
    out.row(6 * i + 5) = e.hess.row(2);
  }
  for (int k = 0; k < 3; ++k) {
    const Vec2& n = mesh.sides()[mesh.triangle_side(t, k)].unit_normal;
    const BasisEval e = basis.eval(0.5 * (z[(k + 1) % 3] + z[(k + 2) % 3]));
    out.row(18 + k) = n.transpose() * e.grad;
  }
  return out;
}

PlateSystem assemble_system(const ArgyrisSpace& space, double sigma, const ScalarField& f,
                            const BcMode& bc, const AssemblyOptions& options) {
  check_sigma(sigma);
  if (bc.is_penalty() && !(bc.epsilon > 0.0)) {
    throw ArgumentError(fmt::format("penalty parameter must be positive, got {}", bc.epsilon));
  }
  const Triangulation& mesh = space.mesh();
  const QuadRule& rule = triangle_quadrature(options.volume_degree);
  const EdgeQuadRule& edge_rule = edge_quadrature(options.edge_degree);
  const std::size_t nt = mesh.num_triangles();

  std::vector<ElementContribution> local(nt);
  parallel_for(nt, [&](std::size_t t) {
    const ElementBasis eb = element_basis(mesh, t);
    const MappedRule q = map_rule(mesh, t, rule);
    ElementContribution& c = local[t];
    c.energy = Eigen::MatrixXd::Zero(kLocalDofs, kLocalDofs);
    c.load = Eigen::VectorXd::Zero(kLocalDofs);
    Eigen::MatrixXd hess(3, kLocalDofs);
    for (std::size_t k = 0; k < q.points.size(); ++k) {
      const BasisEval e = eb.shapes.eval(q.points[k]);
      const Eigen::RowVectorXd lap = e.hess.row(0) + e.hess.row(2);
      hess.row(0) = e.hess.row(0);
      hess.row(1) = std::sqrt(2.0) * e.hess.row(1);
      hess.row(2) = e.hess.row(2);
      c.energy.noalias() += q.weights[k] * (sigma * lap.transpose() * lap +
                                            (1.0 - sigma) * hess.transpose() * hess);
      c.load += q.weights[k] * f(q.points[k]) * e.value;
    }
    if (bc.kind == BcMode::Kind::Penalty) {
      c.penalty = Eigen::MatrixXd::Zero(kLocalDofs, kLocalDofs);
      const auto z = mesh.corners(t);
      for (int k = 0; k < 3; ++k) {
        if (!mesh.sides()[mesh.triangle_side(t, k)].is_boundary) continue;
        const MappedRule eq = map_rule(z[(k + 1) % 3], z[(k + 2) % 3], edge_rule);
        for (std::size_t j = 0; j < eq.points.size(); ++j) {
          const BasisEval e = eb.shapes.eval(eq.points[j]);
          c.penalty.noalias() += (eq.weights[j] / bc.epsilon) * e.value * e.value.transpose();
        }
      }
    }
  });

  const Eigen::Index n = space.num_dofs();
  TripletList energy(n);
  TripletList full(n);
  energy.reserve(nt * kLocalDofs * kLocalDofs);
  PlateSystem sys;
  sys.rhs = Eigen::VectorXd::Zero(n);
  for (std::size_t t = 0; t < nt; ++t) {
    const auto dofs = space.element_dofs(t);
    energy.add_block(dofs, local[t].energy);
    if (local[t].penalty.size() > 0) full.add_block(dofs, local[t].penalty);
    for (int i = 0; i < kLocalDofs; ++i) sys.rhs[dofs[i]] += local[t].load[i];
  }
  if (bc.kind == BcMode::Kind::PenaltyVertexQuadrature) {
    for (const Side& s : mesh.sides()) {
      if (!s.is_boundary) continue;
      for (int v : s.endpoints) {
        full.add(space.vertex_dof(v, 0), space.vertex_dof(v, 0), 0.5 * s.length / bc.epsilon);
      }
    }
  }
  sys.energy = assemble(energy);
  sys.matrix = sys.energy + assemble(full);

  sys.constraints = LinearConstraintSet(n);
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
    if (!mesh.boundary_vertex_flags()[v]) continue;
    if (bc.kind == BcMode::Kind::NodalReduced) {
      sys.constraints.fix(space.vertex_dof(v, 0));
    } else if (bc.kind == BcMode::Kind::Full) {
      const auto& adjacent = mesh.vertex_boundary_sides(v);
      Eigen::MatrixXd rows = Eigen::MatrixXd::Zero(1 + 2 * static_cast<Eigen::Index>(adjacent.size()), 6);
      rows(0, 0) = 1.0;
      for (std::size_t k = 0; k < adjacent.size(); ++k) {
        const Vec2 t = mesh.sides()[adjacent[k]].tangent();
        const auto r = static_cast<Eigen::Index>(1 + 2 * k);
        rows(r, 1) = t.x();
        rows(r, 2) = t.y();
        rows(r + 1, 3) = t.x() * t.x();
        rows(r + 1, 4) = 2.0 * t.x() * t.y();
        rows(r + 1, 5) = t.y() * t.y();
      }
      std::vector<Eigen::Index> dofs;
      for (int k = 0; k < 6; ++k) dofs.push_back(space.vertex_dof(v, k));
      sys.constraints.add_block(std::move(dofs), rows);
    }
  }
  return sys;
}

Eigen::VectorXd interpolate_canonical(const ArgyrisSpace& space, const AnalyticField& v) {
  const Triangulation& mesh = space.mesh();
  Eigen::VectorXd c(space.num_dofs());
  for (std::size_t i = 0; i < mesh.num_vertices(); ++i) {
    const Jet j = v(mesh.vertices()[i]);
    c.segment<6>(space.vertex_dof(i, 0)) << j.value, j.grad.x(), j.grad.y(), j.hess(0, 0),
        j.hess(0, 1), j.hess(1, 1);
  }
  for (std::size_t s = 0; s < mesh.num_sides(); ++s) {
    const Side& side = mesh.sides()[s];
    const Point2 mid = 0.5 * (mesh.vertices()[side.endpoints[0]] + mesh.vertices()[side.endpoints[1]]);
    c[space.side_dof(s)] = v(mid).grad.dot(side.unit_normal);
  }
  return c;
}

Eigen::VectorXd interpolate_modified(const ArgyrisSpace& space, const AnalyticField& v,
                                     int volume_degree) {
  const Triangulation& mesh = space.mesh();
  Eigen::VectorXd c = interpolate_canonical(space, v);
  const QuadRule& rule = triangle_quadrature(volume_degree);
  std::vector<Eigen::Vector3d> integral(mesh.num_triangles());
  parallel_for(mesh.num_triangles(), [&](std::size_t t) {
    const MappedRule q = map_rule(mesh, t, rule);
    Eigen::Vector3d sum = Eigen::Vector3d::Zero();
    for (std::size_t k = 0; k < q.points.size(); ++k) {
      const Mat2 h = v(q.points[k]).hess;
      sum += q.weights[k] * Eigen::Vector3d(h(0, 0), h(0, 1), h(1, 1));
    }
    integral[t] = sum;
  });
  for (std::size_t i = 0; i < mesh.num_vertices(); ++i) {
    Eigen::Vector3d sum = Eigen::Vector3d::Zero();
    double patch_area = 0.0;
    for (int t : mesh.vertex_triangles(i)) {
      sum += integral[t];
      patch_area += mesh.area(t);
    }
    c.segment<3>(space.vertex_dof(i, 3)) = sum / patch_area;
  }
  return c;
}

Jet evaluate_in(const ArgyrisSpace& space, const Eigen::VectorXd& coefficients, std::size_t t,
                const Point2& x) {
  const auto dofs = space.element_dofs(t);
  Eigen::VectorXd local(kLocalDofs);
  for (int i = 0; i < kLocalDofs; ++i) local[i] = coefficients[dofs[i]];
  return element_basis(space.mesh(), t).shapes.combine(x, local);
}

Jet evaluate(const ArgyrisSpace& space, const Eigen::VectorXd& coefficients, const Point2& x) {
  const auto loc = locate_point(space.mesh(), x);
  return evaluate_in(space, coefficients, static_cast<std::size_t>(loc.triangle), x);
}

BendingIntegrals bending_integrals(const ArgyrisSpace& space, const Eigen::VectorXd& coefficients,
                                   int volume_degree) {
  const Triangulation& mesh = space.mesh();
  const QuadRule& rule = triangle_quadrature(volume_degree);
  std::vector<BendingIntegrals> parts(mesh.num_triangles());
  parallel_for(mesh.num_triangles(), [&](std::size_t t) {
    const auto dofs = space.element_dofs(t);
    Eigen::VectorXd local(kLocalDofs);
    for (int i = 0; i < kLocalDofs; ++i) local[i] = coefficients[dofs[i]];
    const ElementBasis eb = element_basis(mesh, t);
    const MappedRule q = map_rule(mesh, t, rule);
    BendingIntegrals& p = parts[t];
    for (std::size_t k = 0; k < q.points.size(); ++k) {
      const Mat2 h = eb.shapes.combine(q.points[k], local).hess;
      p.laplacian_sq += q.weights[k] * h.trace() * h.trace();
      p.hessian_sq += q.weights[k] * h.squaredNorm();
      p.det += q.weights[k] * h.determinant();
    }
  });
  BendingIntegrals total;
  for (const auto& p : parts) {
    total.laplacian_sq += p.laplacian_sq;
    total.hessian_sq += p.hessian_sq;
    total.det += p.det;
  }
  return total;
}

Solution solve(const ArgyrisSpace& space, double sigma, const ScalarField& f, const BcMode& bc,
               const AssemblyOptions& options) {
  return solve_system(assemble_system(space, sigma, f, bc, options));
}

}  // namespace plate::argyris
