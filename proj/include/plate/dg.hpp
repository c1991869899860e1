#pragma once

#include "plate/mesh.hpp"
#include "plate/polyquad.hpp"
#include "plate/system.hpp"

namespace plate::dg {

struct DgParams {
  double gamma0 = 10.0;
  double gamma1 = 10.0;
  int ell = 2;

  /// Throws ArgumentError unless gamma0, gamma1 > 0 and ell >= 2.
  void validate() const;
};

/// Elementwise P_ell, no continuity. Triangle t owns the coefficients of
/// the scaled monomials (centroid, diameter) at offset(t).
class DgSpace {
 public:
  DgSpace(MeshPtr mesh, int ell = 2);

  [[nodiscard]] const Triangulation& mesh() const { return *mesh_; }
  [[nodiscard]] const MeshPtr& mesh_ptr() const { return mesh_; }
  [[nodiscard]] int ell() const { return ell_; }
  [[nodiscard]] Eigen::Index local_dim() const { return polynomial_dimension(ell_); }
  [[nodiscard]] Eigen::Index num_dofs() const {
    return static_cast<Eigen::Index>(mesh_->num_triangles()) * local_dim();
  }
  [[nodiscard]] Eigen::Index offset(std::size_t t) const {
    return static_cast<Eigen::Index>(t) * local_dim();
  }
  [[nodiscard]] PolyBasis basis(std::size_t t) const;

 private:
  MeshPtr mesh_;
  int ell_;
};

struct QuadratureOptions {
  int volume_degree = kDefaultTriangleDegree;
  int edge_degree = kDefaultEdgeDegree;
};

/// Elementwise (D^2 v, D^2 w).
SymSparseMatrix assemble_hessian_mass(const DgSpace& space, const QuadratureOptions& q = {});

/// Symmetrized interior-penalty form: (D^2_h v, D^2_h w)
///   + (<d_n grad v>, [grad w]) + (<d_n grad w>, [grad v])   interior sides
///   - (<d_n lap v>, [w]) - (<d_n lap w>, [v])               all sides
/// with [v] = v|T2 - v|T1 for the side normal pointing from T1 into T2, and
/// jump = average = trace on the boundary.
SymSparseMatrix assemble_ah(const DgSpace& space, const QuadratureOptions& q = {});

/// gamma0 sum_S h_S^-3 ([v],[w])_S over all sides
/// + gamma1 sum_S h_S^-1 ([grad v],[grad w])_S over interior sides.
SymSparseMatrix assemble_sh(const DgSpace& space, const DgParams& params,
                            const QuadratureOptions& q = {});

Eigen::VectorXd assemble_load(const DgSpace& space, const ScalarField& f,
                              const QuadratureOptions& q = {});

/// Matrix a_h + s_h, load (f, v); no strong constraints.
PlateSystem assemble_system(const DgSpace& space, const DgParams& params, const ScalarField& f,
                            const QuadratureOptions& q = {});

/// Per-element quadratic Lagrange interpolation at vertices and side midpoints.
Eigen::VectorXd interpolate_p2(const DgSpace& space, const ScalarField& v);

/// Rejects sigma != 0. Indefinite a_h + s_h raises SolverError.
Solution solve_dg(const DgSpace& space, const DgParams& params, const ScalarField& f,
                  double sigma = 0.0, const QuadratureOptions& q = {});

/// sqrt(||D^2_h v||^2 + s_h(v, v)).
double dg_norm(const DgSpace& space, const DgParams& params, const Eigen::VectorXd& coefficients,
               const QuadratureOptions& q = {});

/// Smallest alpha with (a_h + s_h)(v, v) >= alpha ||v||_dg^2, by a dense
/// generalized eigenvalue problem. Meant for small meshes.
double coercivity_constant(const DgSpace& space, const DgParams& params,
                           const QuadratureOptions& q = {});

Jet evaluate_in(const DgSpace& space, const Eigen::VectorXd& coefficients, std::size_t t,
                const Point2& x);
/// Value from the lowest-index triangle containing x.
double evaluate(const DgSpace& space, const Eigen::VectorXd& coefficients, const Point2& x);

/// Mean of the element values at each vertex.
Eigen::VectorXd vertex_averages(const DgSpace& space, const Eigen::VectorXd& coefficients);

/// ||v_h||_{L2(boundary)}.
double boundary_trace_norm(const DgSpace& space, const Eigen::VectorXd& coefficients,
                           const QuadratureOptions& q = {});

/// ||D^2_h v_h - D^2 v|| over the triangles whose centroid lies within `radius`.
double hessian_error(const DgSpace& space, const Eigen::VectorXd& coefficients,
                     const AnalyticField& v, double radius, const QuadratureOptions& q = {});

}  // namespace plate::dg
