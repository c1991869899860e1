#pragma once

#include "plate/common.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <memory>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace plate {

/// Symmetric matrix kept in full (both triangles) compressed column storage.
using SymSparseMatrix = Eigen::SparseMatrix<double>;

class TripletList {
 public:
  explicit TripletList(Eigen::Index dimension = 0) : dimension_(dimension) {}

  void add(Eigen::Index row, Eigen::Index col, double value);
  /// Scatters a dense local matrix through a local-to-global index map.
  void add_block(std::span<const Eigen::Index> dofs, const Eigen::MatrixXd& local);
  void reserve(std::size_t n) { entries_.reserve(n); }

  [[nodiscard]] Eigen::Index dimension() const { return dimension_; }
  [[nodiscard]] const std::vector<Eigen::Triplet<double>>& entries() const { return entries_; }

 private:
  Eigen::Index dimension_;
  std::vector<Eigen::Triplet<double>> entries_;
};

/// Compresses the triplets; duplicates are summed in insertion order.
SymSparseMatrix assemble(const TripletList& triplets);

/// max |A - A^T| <= rel_tol * max |A|.
bool is_symmetric(const SymSparseMatrix& a, double rel_tol = 1e-12);

struct ConstraintBlock {
  std::vector<Eigen::Index> dofs;  // sorted ascending
  Eigen::MatrixXd null_basis;      // dofs.size() x r, orthonormal columns
};

/// Homogeneous linear constraints grouped into disjoint blocks of degrees of
/// freedom. Each block stores an orthonormal basis of the null space of its
/// constraint rows.
class LinearConstraintSet {
 public:
  static constexpr double kRankTolerance = 1e-10;

  explicit LinearConstraintSet(Eigen::Index dimension = 0) : dimension_(dimension) {}

  /// Adds the constraints rows * x[dofs] = 0. Columns of `rows` follow the
  /// order of `dofs`. Throws ConstraintError when the numerical rank of the
  /// rows is ambiguous, i.e. a singular value falls in (1e-10, 1e-8]
  /// relative to the largest.
  void add_block(std::vector<Eigen::Index> dofs, const Eigen::MatrixXd& rows);
  /// Convenience for x[dof] = 0.
  void fix(Eigen::Index dof);

  [[nodiscard]] Eigen::Index dimension() const { return dimension_; }
  [[nodiscard]] const std::vector<ConstraintBlock>& blocks() const { return blocks_; }
  [[nodiscard]] bool is_constrained(Eigen::Index dof) const;

  /// The expansion map Z: columns span the admissible subspace.
  [[nodiscard]] Eigen::SparseMatrix<double> basis() const;

 private:
  Eigen::Index dimension_;
  std::vector<ConstraintBlock> blocks_;
  std::vector<int> owner_;  // block id per dof, -1 if free
};

struct ReducedSystem {
  SymSparseMatrix matrix;
  Eigen::VectorXd rhs;
  Eigen::SparseMatrix<double> expansion;

  [[nodiscard]] Eigen::VectorXd expand(const Eigen::VectorXd& reduced) const {
    return expansion * reduced;
  }
};

/// Z^T A Z and Z^T b. Reduced unknowns are ordered by the smallest global
/// index of each block, so the result does not depend on block order.
ReducedSystem reduce(const SymSparseMatrix& a, const Eigen::VectorXd& b,
                     const LinearConstraintSet& constraints);

struct SolverReport {
  enum class Method { Direct, Iterative };
  Method method = Method::Direct;
  int iterations = 0;
  double relative_residual = 0.0;
  double seconds = 0.0;
  double condition_estimate = 0.0;  // 0 when not computed
  bool residual_ok = true;          // relative residual within SolveOptions::residual_tolerance

  [[nodiscard]] std::string method_name() const {
    return method == Method::Direct ? "direct" : "iterative";
  }
};

struct SolveOptions {
  Eigen::Index direct_limit = 200000;
  double cg_tolerance = 1e-12;
  double residual_tolerance = 1e-10;
  bool estimate_condition = true;
  int power_steps = 50;
  /// Throw SolverError when the residual stays above tolerance after
  /// refinement; otherwise only SolverReport::residual_ok is cleared.
  bool strict_residual = false;
};

/// Symmetric positive definite solver. Uses a symmetrically Jacobi-scaled
/// LDL^T factorization below `direct_limit`, otherwise diagonally
/// preconditioned conjugate gradients. The factorization is kept so several
/// right-hand sides can share it.
class SpdSolver {
 public:
  explicit SpdSolver(const SymSparseMatrix& a, SolveOptions options = {});
  ~SpdSolver();
  SpdSolver(SpdSolver&&) noexcept;
  SpdSolver& operator=(SpdSolver&&) noexcept;

  [[nodiscard]] Eigen::VectorXd solve(const Eigen::VectorXd& b, SolverReport* report = nullptr) const;
  [[nodiscard]] double condition_estimate() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct SolveResult {
  Eigen::VectorXd x;
  SolverReport report;
};

SolveResult solve(const SymSparseMatrix& a, const Eigen::VectorXd& b, SolveOptions options = {});

void write_matrix_market(const SymSparseMatrix& a, std::ostream& out);

}  // namespace plate
