#pragma once

// Test-side oracles. Nothing here calls into the library's numerics.

#include "plate/common.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <vector>

namespace oracle {

inline double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

/// int over the reference triangle {x, y >= 0, x + y <= 1} of x^a y^b.
inline double reference_monomial_integral(int a, int b) {
  return factorial(a) * factorial(b) / factorial(a + b + 2);
}

/// int_T l1^a l2^b l3^c = 2 |T| a! b! c! / (a + b + c + 2)!
inline double barycentric_monomial_integral(int a, int b, int c, double area) {
  return 2.0 * area * factorial(a) * factorial(b) * factorial(c) / factorial(a + b + c + 2);
}

/// Bivariate polynomial sum c_ab x^a y^b with hand-rolled derivatives.
struct Polynomial {
  struct Term {
    double c;
    int a;
    int b;
  };
  std::vector<Term> terms;

  [[nodiscard]] static double pw(double x, int n) {
    double r = 1.0;
    for (int k = 0; k < n; ++k) r *= x;
    return r;
  }
  [[nodiscard]] double d(const plate::Point2& x, int i, int j) const {
    double s = 0.0;
    for (const auto& t : terms) {
      if (t.a < i || t.b < j) continue;
      double fa = 1.0;
      for (int k = 0; k < i; ++k) fa *= t.a - k;
      double fb = 1.0;
      for (int k = 0; k < j; ++k) fb *= t.b - k;
      s += t.c * fa * fb * pw(x.x(), t.a - i) * pw(x.y(), t.b - j);
    }
    return s;
  }
  [[nodiscard]] plate::Jet jet(const plate::Point2& x) const {
    plate::Jet j;
    j.value = d(x, 0, 0);
    j.grad = plate::Vec2(d(x, 1, 0), d(x, 0, 1));
    j.hess << d(x, 2, 0), d(x, 1, 1), d(x, 1, 1), d(x, 0, 2);
    return j;
  }
  [[nodiscard]] plate::AnalyticField field() const {
    return [p = *this](const plate::Point2& x) { return p.jet(x); };
  }

  static Polynomial random(int degree, std::mt19937& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Polynomial p;
    for (int k = 0; k <= degree; ++k) {
      for (int a = k; a >= 0; --a) p.terms.push_back({u(rng), a, k - a});
    }
    return p;
  }
};

/// exp(0.5 x) sin(1.3 y + 0.4) with exact derivatives.
inline plate::Jet smooth_field(const plate::Point2& x) {
  const double e = std::exp(0.5 * x.x());
  const double s = std::sin(1.3 * x.y() + 0.4);
  const double c = std::cos(1.3 * x.y() + 0.4);
  plate::Jet j;
  j.value = e * s;
  j.grad = plate::Vec2(0.5 * e * s, 1.3 * e * c);
  j.hess << 0.25 * e * s, 0.65 * e * c, 0.65 * e * c, -1.69 * e * s;
  return j;
}

/// Simply supported plate on the unit disk, f = 1, sigma = 0, written out
/// independently: (5 - 6 r^2 + r^4) / 64.
inline double u_exact(const plate::Point2& x) {
  const double r2 = x.squaredNorm();
  return (5.0 - 6.0 * r2 + r2 * r2) / 64.0;
}

inline double log2_ratio(double previous, double current) { return std::log2(previous / current); }

inline plate::Point2 random_point_in_disk(std::mt19937& rng, double radius) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (;;) {
    const plate::Point2 p(u(rng), u(rng));
    if (p.norm() < 1.0) return radius * p;
  }
}

}  // namespace oracle
