#pragma once

#include "plate/mesh.hpp"
#include "plate/polyquad.hpp"
#include "plate/system.hpp"

#include <array>

namespace plate::dkt {

inline constexpr int kLocalDofs = 9;
inline constexpr int kGradientDofs = 12;

/// Discrete Kirchhoff triangle. Three dofs per vertex (v, d1 v, d2 v) at
/// 3 * vertex + k.
class DktSpace {
 public:
  explicit DktSpace(MeshPtr mesh) : mesh_(std::move(mesh)) {}

  [[nodiscard]] const Triangulation& mesh() const { return *mesh_; }
  [[nodiscard]] const MeshPtr& mesh_ptr() const { return mesh_; }
  [[nodiscard]] Eigen::Index num_dofs() const {
    return static_cast<Eigen::Index>(3 * mesh_->num_vertices());
  }
  [[nodiscard]] Eigen::Index dof(std::size_t v, int k) const {
    return static_cast<Eigen::Index>(3 * v) + k;
  }
  [[nodiscard]] std::array<Eigen::Index, kLocalDofs> element_dofs(std::size_t t) const;

 private:
  MeshPtr mesh_;
};

/// Sends the nine element dofs to the P2 vector field theta = grad_h v,
/// stored as (theta_1, theta_2) at the three vertices and then at the
/// midpoints of local sides 0, 1, 2 (side k is opposite vertex k).
using GradientMap = Eigen::Matrix<double, kGradientDofs, kLocalDofs>;
GradientMap gradient_map(const Triangulation& mesh, std::size_t t);

/// P2 Lagrange shape functions of triangle t at x: values and gradients,
/// nodes ordered as in GradientMap.
struct P2Eval {
  Eigen::Matrix<double, 6, 1> value;
  Eigen::Matrix<double, 2, 6> grad;
};
P2Eval p2_eval(const Triangulation& mesh, std::size_t t, const Point2& x);

/// Reduced cubic scalar representative: nine Hermite shape functions whose
/// centroid value is (1/3) sum v(z_i) + (1/6) sum grad v(z_i).(c - z_i).
PolyBasis scalar_basis(const Triangulation& mesh, std::size_t t);

struct AssemblyOptions {
  int volume_degree = kDefaultTriangleDegree;
};

/// Energy sigma (div theta_i, div theta_j) + (1 - sigma)(grad theta_i, grad theta_j)
/// pulled back through the gradient map; value dofs vanish at boundary
/// vertices, gradient dofs stay free.
PlateSystem assemble_system(const DktSpace& space, double sigma, const ScalarField& f,
                            const AssemblyOptions& options = {});

/// Nodal values and gradients of v.
Eigen::VectorXd interpolate(const DktSpace& space, const AnalyticField& v);

double evaluate(const DktSpace& space, const Eigen::VectorXd& coefficients, const Point2& x);

/// theta = grad_h v and its elementwise Jacobian (row c, column d holds
/// d theta_c / dx_d) inside triangle t.
struct GradientEval {
  Vec2 theta;
  Mat2 jacobian;
};
GradientEval discrete_gradient(const DktSpace& space, const Eigen::VectorXd& coefficients,
                               std::size_t t, const Point2& x);

/// L2 norms of grad_h v_h - grad v and D_h^2 v_h - D^2 v over the mesh.
struct ConsistencyErrors {
  double gradient = 0.0;
  double hessian = 0.0;
};
ConsistencyErrors consistency_errors(const DktSpace& space, const Eigen::VectorXd& coefficients,
                                     const AnalyticField& v,
                                     int volume_degree = kDefaultTriangleDegree);

Solution solve(const DktSpace& space, double sigma, const ScalarField& f,
               const AssemblyOptions& options = {});

}  // namespace plate::dkt
