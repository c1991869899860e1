#pragma once

#include "plate/sparse.hpp"

namespace plate {

/// Discrete plate problem: minimize 1/2 x^T matrix x - rhs^T x over the
/// subspace admitted by `constraints`. `energy` is the bending form alone
/// (matrix without boundary penalty terms).
struct PlateSystem {
  SymSparseMatrix matrix;
  SymSparseMatrix energy;
  Eigen::VectorXd rhs;
  LinearConstraintSet constraints;
};

struct Solution {
  Eigen::VectorXd coefficients;
  SolverReport report;
  double energy = 0.0;  // value of the discrete functional at the minimizer
};

/// Reduce, solve, expand.
Solution solve_system(const PlateSystem& system, SolveOptions options = {});

inline double quadratic_form(const SymSparseMatrix& a, const Eigen::VectorXd& x) {
  return x.dot(a * x);
}

}  // namespace plate
