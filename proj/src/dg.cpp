#include "plate/dg.hpp"

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include <cmath>

namespace plate::dg {

namespace {

using Dense = Eigen::MatrixXd;

// Rows d11, sqrt2 d12, d22: Frobenius products become dot products.
Eigen::Matrix3Xd weighted_hessians(const BasisEval& e) {
  Eigen::Matrix3Xd w = e.hess;
  w.row(1) *= std::sqrt(2.0);
  return w;
}

struct SideLocal {
  std::vector<Eigen::Index> dofs;
  Dense a;
  Dense s;
};

// Traces of both neighbours on side s, stacked as [T1 members, T2 members].
struct SideTraces {
  Eigen::VectorXd jump;       // [v]
  Eigen::Matrix2Xd jump_grad; // [grad v]
  Eigen::Matrix2Xd avg_hn;    // <D^2 v n>
  Eigen::VectorXd avg_dnlap;  // <d_n lap v>
};

SideTraces side_traces(const DgSpace& space, const Side& side, const std::vector<PolyBasis>& bases,
                       const Point2& x) {
  const bool interior = !side.is_boundary;
  const Eigen::Index m = space.local_dim();
  const Eigen::Index n = interior ? 2 * m : m;
  SideTraces tr{Eigen::VectorXd::Zero(n), Eigen::Matrix2Xd::Zero(2, n), Eigen::Matrix2Xd::Zero(2, n),
                Eigen::VectorXd::Zero(n)};
  const Vec2& nrm = side.unit_normal;
  const int count = interior ? 2 : 1;
  for (int k = 0; k < count; ++k) {
    const BasisEval e = bases[k].eval(x, true);
    // Boundary: jump and average are the trace. Interior: [v] = v2 - v1.
    const double js = interior ? (k == 0 ? -1.0 : 1.0) : 1.0;
    const double as = interior ? 0.5 : 1.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      const Eigen::Index c = k * m + i;
      tr.jump[c] = js * e.value[i];
      tr.jump_grad.col(c) = js * e.grad.col(i);
      tr.avg_hn.col(c) = as * (e.hessian(i) * nrm);
      tr.avg_dnlap[c] = as * e.grad_laplacian.col(i).dot(nrm);
    }
  }
  return tr;
}

std::vector<SideLocal> side_matrices(const DgSpace& space, const QuadratureOptions& q,
                                     const DgParams* params) {
  const Triangulation& mesh = space.mesh();
  const EdgeQuadRule& rule = edge_quadrature(q.edge_degree);
  const Eigen::Index m = space.local_dim();
  std::vector<SideLocal> out(mesh.num_sides());
  parallel_for(mesh.num_sides(), [&](std::size_t s) {
    const Side& side = mesh.sides()[s];
    const bool interior = !side.is_boundary;
    std::vector<PolyBasis> bases;
    SideLocal& loc = out[s];
    for (int k = 0; k < (interior ? 2 : 1); ++k) {
      const auto t = static_cast<std::size_t>(side.triangles[k]);
      bases.push_back(space.basis(t));
      for (Eigen::Index i = 0; i < m; ++i) loc.dofs.push_back(space.offset(t) + i);
    }
    const auto n = static_cast<Eigen::Index>(loc.dofs.size());
    loc.a = Dense::Zero(n, n);
    loc.s = Dense::Zero(n, n);
    const MappedRule r = map_rule(mesh.vertices()[side.endpoints[0]],
                                  mesh.vertices()[side.endpoints[1]], rule);
    const double h = side.length;
    for (std::size_t p = 0; p < r.points.size(); ++p) {
      const SideTraces tr = side_traces(space, side, bases, r.points[p]);
      const double w = r.weights[p];
      if (params == nullptr) {
        if (interior) {
          const Dense c = tr.avg_hn.transpose() * tr.jump_grad;
          loc.a.noalias() += w * (c + c.transpose());
        }
        const Dense d = tr.avg_dnlap * tr.jump.transpose();
        loc.a.noalias() -= w * (d + d.transpose());
      } else {
        loc.s.noalias() += w * params->gamma0 / (h * h * h) * tr.jump * tr.jump.transpose();
        if (interior) {
          loc.s.noalias() += w * params->gamma1 / h * tr.jump_grad.transpose() * tr.jump_grad;
        }
      }
    }
  });
  return out;
}

std::vector<Dense> volume_matrices(const DgSpace& space, const QuadratureOptions& q) {
  const Triangulation& mesh = space.mesh();
  const QuadRule& rule = triangle_quadrature(q.volume_degree);
  const Eigen::Index m = space.local_dim();
  std::vector<Dense> out(mesh.num_triangles());
  parallel_for(mesh.num_triangles(), [&](std::size_t t) {
    const PolyBasis basis = space.basis(t);
    const MappedRule r = map_rule(mesh, t, rule);
    Dense k = Dense::Zero(m, m);
    for (std::size_t p = 0; p < r.points.size(); ++p) {
      const Eigen::Matrix3Xd h = weighted_hessians(basis.eval(r.points[p]));
      k.noalias() += r.weights[p] * h.transpose() * h;
    }
    out[t] = std::move(k);
  });
  return out;
}

void scatter_volume(const DgSpace& space, const std::vector<Dense>& locals, TripletList& triplets) {
  const Eigen::Index m = space.local_dim();
  std::vector<Eigen::Index> dofs(static_cast<std::size_t>(m));
  for (std::size_t t = 0; t < locals.size(); ++t) {
    for (Eigen::Index i = 0; i < m; ++i) dofs[static_cast<std::size_t>(i)] = space.offset(t) + i;
    triplets.add_block(dofs, locals[t]);
  }
}

SymSparseMatrix sum_sides(const DgSpace& space, const std::vector<SideLocal>& sides, bool stab,
                          const std::vector<Dense>* volume) {
  TripletList triplets(space.num_dofs());
  if (volume != nullptr) scatter_volume(space, *volume, triplets);
  for (const auto& s : sides) triplets.add_block(s.dofs, stab ? s.s : s.a);
  return assemble(triplets);
}

}  // namespace

void DgParams::validate() const {
  if (!(gamma0 > 0.0) || !(gamma1 > 0.0)) {
    throw ArgumentError(fmt::format("penalty parameters must be positive (gamma0={}, gamma1={})",
                                    gamma0, gamma1));
  }
  if (ell < 2) throw ArgumentError(fmt::format("polynomial degree {} below 2", ell));
}

DgSpace::DgSpace(MeshPtr mesh, int ell) : mesh_(std::move(mesh)), ell_(ell) {
  if (ell < 2) throw ArgumentError(fmt::format("polynomial degree {} below 2", ell));
  if (ell > 6) throw ArgumentError(fmt::format("polynomial degree {} above 6", ell));
}

PolyBasis DgSpace::basis(std::size_t t) const {
  const auto z = mesh_->corners(t);
  return PolyBasis(MonomialBasis(ell_, (z[0] + z[1] + z[2]) / 3.0, mesh_->diameter(t)));
}

SymSparseMatrix assemble_hessian_mass(const DgSpace& space, const QuadratureOptions& q) {
  TripletList triplets(space.num_dofs());
  scatter_volume(space, volume_matrices(space, q), triplets);
  return assemble(triplets);
}

SymSparseMatrix assemble_ah(const DgSpace& space, const QuadratureOptions& q) {
  const auto volume = volume_matrices(space, q);
  return sum_sides(space, side_matrices(space, q, nullptr), false, &volume);
}

SymSparseMatrix assemble_sh(const DgSpace& space, const DgParams& params,
                            const QuadratureOptions& q) {
  params.validate();
  return sum_sides(space, side_matrices(space, q, &params), true, nullptr);
}

Eigen::VectorXd assemble_load(const DgSpace& space, const ScalarField& f,
                              const QuadratureOptions& q) {
  const Triangulation& mesh = space.mesh();
  const QuadRule& rule = triangle_quadrature(q.volume_degree);
  const Eigen::Index m = space.local_dim();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(space.num_dofs());
  parallel_for(mesh.num_triangles(), [&](std::size_t t) {
    const PolyBasis basis = space.basis(t);
    const MappedRule r = map_rule(mesh, t, rule);
    Eigen::VectorXd local = Eigen::VectorXd::Zero(m);
    for (std::size_t p = 0; p < r.points.size(); ++p) {
      local += r.weights[p] * f(r.points[p]) * basis.eval(r.points[p]).value;
    }
    b.segment(space.offset(t), m) = local;
  });
  return b;
}

PlateSystem assemble_system(const DgSpace& space, const DgParams& params, const ScalarField& f,
                            const QuadratureOptions& q) {
  params.validate();
  if (params.ell != space.ell()) {
    throw ArgumentError(fmt::format("space degree {} differs from parameter degree {}",
                                    space.ell(), params.ell));
  }
  PlateSystem sys;
  sys.matrix = assemble_ah(space, q) + assemble_sh(space, params, q);
  sys.energy = sys.matrix;
  sys.rhs = assemble_load(space, f, q);
  sys.constraints = LinearConstraintSet(space.num_dofs());
  return sys;
}

Eigen::VectorXd interpolate_p2(const DgSpace& space, const ScalarField& v) {
  const Triangulation& mesh = space.mesh();
  const Eigen::Index m = space.local_dim();
  Eigen::VectorXd c = Eigen::VectorXd::Zero(space.num_dofs());
  parallel_for(mesh.num_triangles(), [&](std::size_t t) {
    const auto z = mesh.corners(t);
    const PolyBasis basis = space.basis(t);
    std::array<Point2, 6> nodes{z[0], z[1], z[2], (z[1] + z[2]) / 2.0, (z[2] + z[0]) / 2.0,
                                (z[0] + z[1]) / 2.0};
    Eigen::Matrix<double, 6, 6> a;
    Eigen::Matrix<double, 6, 1> rhs;
    for (int i = 0; i < 6; ++i) {
      // Monomials are ordered by total degree, so the first six span P2.
      a.row(i) = basis.monomials().eval(nodes[i]).value.head<6>().transpose();
      rhs[i] = v(nodes[i]);
    }
    Eigen::VectorXd local = Eigen::VectorXd::Zero(m);
    local.head<6>() = a.partialPivLu().solve(rhs);
    c.segment(space.offset(t), m) = local;
  });
  return c;
}

Solution solve_dg(const DgSpace& space, const DgParams& params, const ScalarField& f, double sigma,
                  const QuadratureOptions& q) {
  if (sigma != 0.0) {
    throw ArgumentError(fmt::format("the DG method supports sigma = 0 only, got {}", sigma));
  }
  const PlateSystem sys = assemble_system(space, params, f, q);
  try {
    return solve_system(sys);
  } catch (const SolverError& e) {
    throw SolverError(fmt::format("DG matrix not positive definite (gamma0={}, gamma1={}); "
                                  "try larger penalty parameters: {}",
                                  params.gamma0, params.gamma1, e.what()));
  }
}

double dg_norm(const DgSpace& space, const DgParams& params, const Eigen::VectorXd& coefficients,
               const QuadratureOptions& q) {
  const SymSparseMatrix b = assemble_hessian_mass(space, q) + assemble_sh(space, params, q);
  return std::sqrt(std::max(0.0, quadratic_form(b, coefficients)));
}

double coercivity_constant(const DgSpace& space, const DgParams& params,
                           const QuadratureOptions& q) {
  const SymSparseMatrix s = assemble_sh(space, params, q);
  const Dense a = Dense(assemble_ah(space, q) + s);
  const Dense b = Dense(assemble_hessian_mass(space, q) + s);
  Eigen::GeneralizedSelfAdjointEigenSolver<Dense> solver(a, b, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw SolverError("generalized eigenvalue problem failed (dg norm matrix not definite)");
  }
  return solver.eigenvalues().minCoeff();
}

Jet evaluate_in(const DgSpace& space, const Eigen::VectorXd& coefficients, std::size_t t,
                const Point2& x) {
  return space.basis(t).combine(x, coefficients.segment(space.offset(t), space.local_dim()));
}

double evaluate(const DgSpace& space, const Eigen::VectorXd& coefficients, const Point2& x) {
  const auto loc = locate_point(space.mesh(), x);
  return evaluate_in(space, coefficients, static_cast<std::size_t>(loc.triangle), x).value;
}

Eigen::VectorXd vertex_averages(const DgSpace& space, const Eigen::VectorXd& coefficients) {
  const Triangulation& mesh = space.mesh();
  Eigen::VectorXd out(static_cast<Eigen::Index>(mesh.num_vertices()));
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
    const auto& tris = mesh.vertex_triangles(v);
    double sum = 0.0;
    for (int t : tris) sum += evaluate_in(space, coefficients, static_cast<std::size_t>(t),
                                          mesh.vertices()[v]).value;
    out[static_cast<Eigen::Index>(v)] = tris.empty() ? 0.0 : sum / static_cast<double>(tris.size());
  }
  return out;
}

double boundary_trace_norm(const DgSpace& space, const Eigen::VectorXd& coefficients,
                           const QuadratureOptions& q) {
  const Triangulation& mesh = space.mesh();
  const EdgeQuadRule& rule = edge_quadrature(q.edge_degree);
  double sum = 0.0;
  for (const Side& side : mesh.sides()) {
    if (!side.is_boundary) continue;
    const MappedRule r = map_rule(mesh.vertices()[side.endpoints[0]],
                                  mesh.vertices()[side.endpoints[1]], rule);
    const auto t = static_cast<std::size_t>(side.triangles[0]);
    for (std::size_t p = 0; p < r.points.size(); ++p) {
      const double v = evaluate_in(space, coefficients, t, r.points[p]).value;
      sum += r.weights[p] * v * v;
    }
  }
  return std::sqrt(sum);
}

double hessian_error(const DgSpace& space, const Eigen::VectorXd& coefficients,
                     const AnalyticField& v, double radius, const QuadratureOptions& q) {
  const Triangulation& mesh = space.mesh();
  const QuadRule& rule = triangle_quadrature(q.volume_degree);
  std::vector<double> parts(mesh.num_triangles(), 0.0);
  parallel_for(mesh.num_triangles(), [&](std::size_t t) {
    const auto z = mesh.corners(t);
    if (((z[0] + z[1] + z[2]) / 3.0).norm() > radius) return;
    const MappedRule r = map_rule(mesh, t, rule);
    double sum = 0.0;
    for (std::size_t p = 0; p < r.points.size(); ++p) {
      const Jet jh = evaluate_in(space, coefficients, t, r.points[p]);
      sum += r.weights[p] * (jh.hess - v(r.points[p]).hess).squaredNorm();
    }
    parts[t] = sum;
  });
  double total = 0.0;
  for (double p : parts) total += p;
  return std::sqrt(total);
}

}  // namespace plate::dg
