#pragma once

#include "plate/common.hpp"
#include "plate/mesh.hpp"

#include <array>
#include <vector>

namespace plate {

inline constexpr int kDefaultTriangleDegree = 10;
inline constexpr int kDefaultEdgeDegree = 11;

/// Values and exact derivatives of a set of bivariate polynomials at a point.
struct BasisEval {
  Eigen::VectorXd value;
  Eigen::Matrix2Xd grad;              // column i: gradient of member i
  Eigen::Matrix3Xd hess;              // column i: (d11, d12, d22) of member i
  Eigen::Matrix2Xd grad_laplacian;    // column i: gradient of the Laplacian

  [[nodiscard]] Mat2 hessian(Eigen::Index i) const {
    Mat2 h;
    h << hess(0, i), hess(1, i), hess(1, i), hess(2, i);
    return h;
  }
};

/// Monomials (x - c)^a (y - c)^b / s^(a+b) of total degree <= degree, ordered
/// by total degree and then by decreasing power of x. Derivatives are
/// returned with respect to physical coordinates.
class MonomialBasis {
 public:
  explicit MonomialBasis(int degree, Point2 center = Point2::Zero(), double scale = 1.0);

  [[nodiscard]] int degree() const { return degree_; }
  [[nodiscard]] Eigen::Index size() const { return static_cast<Eigen::Index>(exponents_.size()); }
  [[nodiscard]] const std::vector<std::array<int, 2>>& exponents() const { return exponents_; }
  [[nodiscard]] const Point2& center() const { return center_; }
  [[nodiscard]] double scale() const { return scale_; }

  [[nodiscard]] BasisEval eval(const Point2& x, bool third_order = false) const;

  /// Derivatives d^(i+j)/dxi^i deta^j of every monomial at the scaled point
  /// (xi, eta), in scaled coordinates; used to form functional matrices.
  [[nodiscard]] Eigen::VectorXd scaled_derivative(const Point2& x, int i, int j) const;

 private:
  int degree_;
  Point2 center_;
  double scale_;
  std::vector<std::array<int, 2>> exponents_;
};

inline constexpr Eigen::Index polynomial_dimension(int degree) {
  return (degree + 1) * (degree + 2) / 2;
}

/// Shape functions expanded in a monomial basis: member i equals
/// sum_m coefficients(m, i) * monomial_m.
class PolyBasis {
 public:
  PolyBasis(MonomialBasis monomials, Eigen::MatrixXd coefficients);
  /// Plain monomial basis (identity coefficients).
  explicit PolyBasis(MonomialBasis monomials);

  [[nodiscard]] int degree() const { return monomials_.degree(); }
  [[nodiscard]] Eigen::Index size() const { return coefficients_.cols(); }
  [[nodiscard]] const MonomialBasis& monomials() const { return monomials_; }
  [[nodiscard]] const Eigen::MatrixXd& coefficients() const { return coefficients_; }

  [[nodiscard]] BasisEval eval(const Point2& x, bool third_order = false) const;
  /// Jet of the combination sum_i weights[i] * member_i.
  [[nodiscard]] Jet combine(const Point2& x, const Eigen::VectorXd& weights) const;

 private:
  MonomialBasis monomials_;
  Eigen::MatrixXd coefficients_;
};

BasisEval eval_basis(const PolyBasis& basis, const Point2& x);

/// Positive-weight rule on a triangle. Weights sum to 1; multiply by the
/// triangle area to integrate.
struct QuadRule {
  std::vector<std::array<double, 3>> points;  // barycentric
  std::vector<double> weights;
  int exact_degree = 0;

  [[nodiscard]] std::size_t size() const { return weights.size(); }
};

/// Gauss-Legendre rule on [0, 1]; weights sum to 1.
struct EdgeQuadRule {
  std::vector<double> points;
  std::vector<double> weights;
  int exact_degree = 0;

  [[nodiscard]] std::size_t size() const { return weights.size(); }
};

inline constexpr int kMaxTriangleDegree = 12;
inline constexpr int kMaxEdgeDegree = 11;

/// Collapsed (Duffy) Gauss product rule exact for polynomials of total
/// degree <= exact_degree; 1 <= exact_degree <= 12.
const QuadRule& triangle_quadrature(int exact_degree = kDefaultTriangleDegree);
const EdgeQuadRule& edge_quadrature(int exact_degree = kDefaultEdgeDegree);

/// Physical quadrature points and weights of `rule` on triangle t.
struct MappedRule {
  std::vector<Point2> points;
  std::vector<double> weights;
};
MappedRule map_rule(const Triangulation& mesh, std::size_t t, const QuadRule& rule);
MappedRule map_rule(const Point2& a, const Point2& b, const EdgeQuadRule& rule);

}  // namespace plate
