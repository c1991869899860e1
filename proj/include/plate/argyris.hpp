#pragma once

#include "plate/mesh.hpp"
#include "plate/polyquad.hpp"
#include "plate/system.hpp"

#include <array>
#include <string>

namespace plate::argyris {

inline constexpr int kLocalDofs = 21;
inline constexpr double kMaxVandermondeCondition = 1e12;

/// Boundary treatment for the conforming quintic discretization.
///   Full                     v = 0 on every boundary side (quintic trace)
///   NodalReduced             v(z) = 0 at boundary vertices only
///   Penalty                  (1/2 eps) int_{boundary} v^2, exact edge quadrature
///   PenaltyVertexQuadrature  same with the trapezoidal rule on each side
struct BcMode {
  enum class Kind { Full, NodalReduced, Penalty, PenaltyVertexQuadrature };
  Kind kind = Kind::NodalReduced;
  double epsilon = 0.0;

  static BcMode full() { return {Kind::Full, 0.0}; }
  static BcMode nodal() { return {Kind::NodalReduced, 0.0}; }
  static BcMode penalty(double eps) { return {Kind::Penalty, eps}; }
  static BcMode penalty_vertex(double eps) { return {Kind::PenaltyVertexQuadrature, eps}; }

  [[nodiscard]] bool is_penalty() const {
    return kind == Kind::Penalty || kind == Kind::PenaltyVertexQuadrature;
  }
  [[nodiscard]] std::string name() const;
};

/// Global numbering: six dofs per vertex (v, d1, d2, d11, d12, d22) at
/// 6 * vertex, then one normal-derivative dof per side at 6 * nv + side,
/// signed by the side's fixed normal.
class ArgyrisSpace {
 public:
  explicit ArgyrisSpace(MeshPtr mesh) : mesh_(std::move(mesh)) {}

  [[nodiscard]] const Triangulation& mesh() const { return *mesh_; }
  [[nodiscard]] const MeshPtr& mesh_ptr() const { return mesh_; }
  [[nodiscard]] Eigen::Index num_dofs() const {
    return static_cast<Eigen::Index>(6 * mesh_->num_vertices() + mesh_->num_sides());
  }
  [[nodiscard]] Eigen::Index vertex_dof(std::size_t v, int k) const {
    return static_cast<Eigen::Index>(6 * v) + k;
  }
  [[nodiscard]] Eigen::Index side_dof(std::size_t s) const {
    return static_cast<Eigen::Index>(6 * mesh_->num_vertices() + s);
  }
  [[nodiscard]] std::array<Eigen::Index, kLocalDofs> element_dofs(std::size_t t) const;

 private:
  MeshPtr mesh_;
};

/// 21 quintic shape functions of one triangle, dual to the node functionals.
struct ElementBasis {
  PolyBasis shapes;
  Eigen::VectorXd scaling;  // functional scaling used for conditioning
  double condition = 0.0;   // estimated condition of the scaled Vandermonde matrix
};

ElementBasis element_basis(const Triangulation& mesh, std::size_t t);

/// Matrix of node functionals applied to the members of `basis`:
/// entry (j, i) = functional_j(member_i).
Eigen::MatrixXd apply_functionals(const Triangulation& mesh, std::size_t t, const PolyBasis& basis);

struct AssemblyOptions {
  int volume_degree = kDefaultTriangleDegree;
  int edge_degree = kDefaultEdgeDegree;
};

/// Matrix sigma (lap u, lap v) + (1 - sigma)(D^2 u : D^2 v) over the mesh,
/// load (f, v), and the boundary treatment of `bc`.
PlateSystem assemble_system(const ArgyrisSpace& space, double sigma, const ScalarField& f,
                            const BcMode& bc, const AssemblyOptions& options = {});

/// Node functionals applied to v.
Eigen::VectorXd interpolate_canonical(const ArgyrisSpace& space, const AnalyticField& v);

/// As canonical, but second-derivative dofs are patch averages of D^2 v.
Eigen::VectorXd interpolate_modified(const ArgyrisSpace& space, const AnalyticField& v,
                                     int volume_degree = kDefaultTriangleDegree);

Jet evaluate(const ArgyrisSpace& space, const Eigen::VectorXd& coefficients, const Point2& x);
Jet evaluate_in(const ArgyrisSpace& space, const Eigen::VectorXd& coefficients, std::size_t t,
                const Point2& x);

/// Integrals of (lap v)^2, |D^2 v|^2 and det D^2 v over the mesh domain.
struct BendingIntegrals {
  double laplacian_sq = 0.0;
  double hessian_sq = 0.0;
  double det = 0.0;
};
BendingIntegrals bending_integrals(const ArgyrisSpace& space, const Eigen::VectorXd& coefficients,
                                   int volume_degree = kDefaultTriangleDegree);

Solution solve(const ArgyrisSpace& space, double sigma, const ScalarField& f, const BcMode& bc,
               const AssemblyOptions& options = {});

}  // namespace plate::argyris
