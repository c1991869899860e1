#include "plate/polyquad.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <map>
#include <mutex>
#include <utility>

namespace plate {

namespace {

// Falling factorial a (a-1) ... (a-k+1).
double falling(int a, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= static_cast<double>(a - i);
  return r;
}

template <unsigned N>
std::pair<std::vector<double>, std::vector<double>> gauss_unit_interval() {
  using Rule = boost::math::quadrature::gauss<double, N>;
  std::vector<std::pair<double, double>> nodes;
  const auto& x = Rule::abscissa();
  const auto& w = Rule::weights();
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == 0.0) {
      nodes.emplace_back(0.0, w[i]);
    } else {
      nodes.emplace_back(-x[i], w[i]);
      nodes.emplace_back(x[i], w[i]);
    }
  }
  std::sort(nodes.begin(), nodes.end());
  std::vector<double> points;
  std::vector<double> weights;
  for (const auto& [xi, wi] : nodes) {
    points.push_back(0.5 * (1.0 + xi));
    weights.push_back(0.5 * wi);
  }
  return {points, weights};
}

std::pair<std::vector<double>, std::vector<double>> gauss_points(int n) {
  switch (n) {
    case 1: return gauss_unit_interval<1>();
    case 2: return gauss_unit_interval<2>();
    case 3: return gauss_unit_interval<3>();
    case 4: return gauss_unit_interval<4>();
    case 5: return gauss_unit_interval<5>();
    case 6: return gauss_unit_interval<6>();
    case 7: return gauss_unit_interval<7>();
    default: throw ArgumentError(fmt::format("no Gauss rule with {} points", n));
  }
}

QuadRule make_triangle_rule(int degree) {
  // x = u, y = (1 - u) v on the unit reference triangle; the Jacobian 1 - u
  // raises the degree in u by one.
  const int nu = (degree + 3) / 2;
  const int nv = (degree + 2) / 2;
  const auto [pu, wu] = gauss_points(nu);
  const auto [pv, wv] = gauss_points(nv);
  QuadRule rule;
  rule.exact_degree = degree;
  for (int i = 0; i < nu; ++i) {
    for (int j = 0; j < nv; ++j) {
      const double x = pu[i];
      const double y = (1.0 - pu[i]) * pv[j];
      rule.points.push_back({1.0 - x - y, x, y});
      rule.weights.push_back(2.0 * wu[i] * wv[j] * (1.0 - pu[i]));
    }
  }
  return rule;
}

}  // namespace

MonomialBasis::MonomialBasis(int degree, Point2 center, double scale)
    : degree_(degree), center_(std::move(center)), scale_(scale) {
  if (degree < 0) throw ArgumentError("polynomial degree must be nonnegative");
  if (!(scale > 0.0)) throw ArgumentError("monomial scale must be positive");
  for (int d = 0; d <= degree; ++d) {
    for (int a = d; a >= 0; --a) exponents_.push_back({a, d - a});
  }
}

Eigen::VectorXd MonomialBasis::scaled_derivative(const Point2& x, int i, int j) const {
  const double xi = (x.x() - center_.x()) / scale_;
  const double eta = (x.y() - center_.y()) / scale_;
  std::vector<double> px(degree_ + 1, 1.0);
  std::vector<double> py(degree_ + 1, 1.0);
  for (int k = 1; k <= degree_; ++k) {
    px[k] = px[k - 1] * xi;
    py[k] = py[k - 1] * eta;
  }
  Eigen::VectorXd out(size());
  for (Eigen::Index m = 0; m < size(); ++m) {
    const auto [a, b] = exponents_[m];
    out[m] = (a < i || b < j) ? 0.0 : falling(a, i) * falling(b, j) * px[a - i] * py[b - j];
  }
  return out;
}

BasisEval MonomialBasis::eval(const Point2& x, bool third_order) const {
  const double xi = (x.x() - center_.x()) / scale_;
  const double eta = (x.y() - center_.y()) / scale_;
  std::vector<double> px(degree_ + 1, 1.0);
  std::vector<double> py(degree_ + 1, 1.0);
  for (int k = 1; k <= degree_; ++k) {
    px[k] = px[k - 1] * xi;
    py[k] = py[k - 1] * eta;
  }
  auto pow_x = [&](int a) { return a < 0 ? 0.0 : px[a]; };
  auto pow_y = [&](int b) { return b < 0 ? 0.0 : py[b]; };

  const Eigen::Index n = size();
  const double s1 = 1.0 / scale_;
  const double s2 = s1 * s1;
  const double s3 = s2 * s1;
  BasisEval e;
  e.value.resize(n);
  e.grad.resize(2, n);
  e.hess.resize(3, n);
  e.grad_laplacian.setZero(2, n);
  for (Eigen::Index m = 0; m < n; ++m) {
    const auto [a, b] = exponents_[m];
    e.value[m] = px[a] * py[b];
    e.grad(0, m) = s1 * a * pow_x(a - 1) * py[b];
    e.grad(1, m) = s1 * b * px[a] * pow_y(b - 1);
    e.hess(0, m) = s2 * falling(a, 2) * pow_x(a - 2) * py[b];
    e.hess(1, m) = s2 * a * b * pow_x(a - 1) * pow_y(b - 1);
    e.hess(2, m) = s2 * falling(b, 2) * px[a] * pow_y(b - 2);
    if (third_order) {
      e.grad_laplacian(0, m) = s3 * (falling(a, 3) * pow_x(a - 3) * py[b] +
                                     a * falling(b, 2) * pow_x(a - 1) * pow_y(b - 2));
      e.grad_laplacian(1, m) = s3 * (falling(a, 2) * b * pow_x(a - 2) * pow_y(b - 1) +
                                     falling(b, 3) * px[a] * pow_y(b - 3));
    }
  }
  return e;
}

PolyBasis::PolyBasis(MonomialBasis monomials, Eigen::MatrixXd coefficients)
    : monomials_(std::move(monomials)), coefficients_(std::move(coefficients)) {
  if (coefficients_.rows() != monomials_.size()) {
    throw ArgumentError("coefficient rows must match the monomial count");
  }
}

PolyBasis::PolyBasis(MonomialBasis monomials)
    : PolyBasis(monomials, Eigen::MatrixXd::Identity(monomials.size(), monomials.size())) {}

BasisEval PolyBasis::eval(const Point2& x, bool third_order) const {
  BasisEval m = monomials_.eval(x, third_order);
  BasisEval e;
  e.value = coefficients_.transpose() * m.value;
  e.grad = m.grad * coefficients_;
  e.hess = m.hess * coefficients_;
  e.grad_laplacian = m.grad_laplacian * coefficients_;
  return e;
}

Jet PolyBasis::combine(const Point2& x, const Eigen::VectorXd& weights) const {
  const Eigen::VectorXd c = coefficients_ * weights;
  const BasisEval m = monomials_.eval(x);
  Jet j;
  j.value = m.value.dot(c);
  j.grad = m.grad * c;
  const Eigen::Vector3d h = m.hess * c;
  j.hess << h[0], h[1], h[1], h[2];
  return j;
}

BasisEval eval_basis(const PolyBasis& basis, const Point2& x) { return basis.eval(x); }

const QuadRule& triangle_quadrature(int exact_degree) {
  if (exact_degree < 1 || exact_degree > kMaxTriangleDegree) {
    throw ArgumentError(fmt::format("unsupported triangle quadrature degree {}", exact_degree));
  }
  static std::mutex mutex;
  static std::map<int, QuadRule> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(exact_degree);
  if (it == cache.end()) it = cache.emplace(exact_degree, make_triangle_rule(exact_degree)).first;
  return it->second;
}

const EdgeQuadRule& edge_quadrature(int exact_degree) {
  if (exact_degree < 1 || exact_degree > kMaxEdgeDegree) {
    throw ArgumentError(fmt::format("unsupported edge quadrature degree {}", exact_degree));
  }
  static std::mutex mutex;
  static std::map<int, EdgeQuadRule> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(exact_degree);
  if (it == cache.end()) {
    auto [p, w] = gauss_points((exact_degree + 2) / 2);
    it = cache.emplace(exact_degree, EdgeQuadRule{std::move(p), std::move(w), exact_degree}).first;
  }
  return it->second;
}

MappedRule map_rule(const Triangulation& mesh, std::size_t t, const QuadRule& rule) {
  const auto c = mesh.corners(t);
  const double area = mesh.area(t);
  MappedRule out;
  out.points.reserve(rule.size());
  out.weights.reserve(rule.size());
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const auto& l = rule.points[q];
    out.points.push_back(l[0] * c[0] + l[1] * c[1] + l[2] * c[2]);
    out.weights.push_back(rule.weights[q] * area);
  }
  return out;
}

MappedRule map_rule(const Point2& a, const Point2& b, const EdgeQuadRule& rule) {
  const double length = (b - a).norm();
  MappedRule out;
  for (std::size_t q = 0; q < rule.size(); ++q) {
    out.points.push_back(a + rule.points[q] * (b - a));
    out.weights.push_back(rule.weights[q] * length);
  }
  return out;
}

}  // namespace plate
