#include "plate/sparse.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SVD>
#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

namespace plate {

void TripletList::add(Eigen::Index row, Eigen::Index col, double value) {
  if (row < 0 || col < 0 || row >= dimension_ || col >= dimension_) {
    throw ArgumentError(
        fmt::format("triplet ({}, {}) outside dimension {}", row, col, dimension_));
  }
  entries_.emplace_back(row, col, value);
}

void TripletList::add_block(std::span<const Eigen::Index> dofs, const Eigen::MatrixXd& local) {
  const auto n = static_cast<Eigen::Index>(dofs.size());
  if (local.rows() != n || local.cols() != n) throw ArgumentError("local matrix size mismatch");
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) add(dofs[i], dofs[j], local(i, j));
  }
}

SymSparseMatrix assemble(const TripletList& triplets) {
  SymSparseMatrix a(triplets.dimension(), triplets.dimension());
  a.setFromTriplets(triplets.entries().begin(), triplets.entries().end());
  a.makeCompressed();
  return a;
}

bool is_symmetric(const SymSparseMatrix& a, double rel_tol) {
  if (a.rows() != a.cols()) return false;
  const SymSparseMatrix t = a.transpose();
  const double scale = a.nonZeros() ? a.coeffs().cwiseAbs().maxCoeff() : 0.0;
  const SymSparseMatrix d = a - t;
  const double diff = d.nonZeros() ? d.coeffs().cwiseAbs().maxCoeff() : 0.0;
  return diff <= rel_tol * scale;
}

void LinearConstraintSet::add_block(std::vector<Eigen::Index> dofs, const Eigen::MatrixXd& rows) {
  const auto k = static_cast<Eigen::Index>(dofs.size());
  if (rows.cols() != k) throw ArgumentError("constraint rows must have one column per dof");
  if (owner_.empty()) owner_.assign(static_cast<std::size_t>(dimension_), -1);
  const std::size_t id = blocks_.size();
  for (auto d : dofs) {
    if (d < 0 || d >= dimension_) throw ArgumentError(fmt::format("constraint dof {} out of range", d));
    if (owner_[d] >= 0) {
      throw ConstraintError(fmt::format("dof {} already belongs to block {}", d, owner_[d]), id);
    }
  }

  // Canonical dof order inside the block.
  std::vector<Eigen::Index> order(static_cast<std::size_t>(k));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return dofs[a] < dofs[b]; });
  ConstraintBlock block;
  Eigen::MatrixXd sorted_rows(rows.rows(), k);
  for (Eigen::Index j = 0; j < k; ++j) {
    block.dofs.push_back(dofs[order[j]]);
    sorted_rows.col(j) = rows.col(order[j]);
  }
  if (std::adjacent_find(block.dofs.begin(), block.dofs.end()) != block.dofs.end()) {
    throw ConstraintError("repeated dof inside a constraint block", id);
  }

  if (sorted_rows.rows() == 0) {
    block.null_basis = Eigen::MatrixXd::Identity(k, k);
  } else {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(sorted_rows, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    const double smax = s.size() ? s[0] : 0.0;
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
      if (s[i] > kRankTolerance * smax) {
        ++rank;
        if (s[i] <= 1e-8 * smax) {
          throw ConstraintError(
              fmt::format("constraint block {} has ambiguous numerical rank (sigma ratio {:.3g})",
                          id, s[i] / smax),
              id);
        }
      }
    }
    block.null_basis = svd.matrixV().rightCols(k - rank);
  }
  for (auto d : block.dofs) owner_[d] = static_cast<int>(id);
  blocks_.push_back(std::move(block));
}

void LinearConstraintSet::fix(Eigen::Index dof) {
  add_block({dof}, Eigen::MatrixXd::Ones(1, 1));
}

bool LinearConstraintSet::is_constrained(Eigen::Index dof) const {
  return !owner_.empty() && owner_[dof] >= 0;
}

Eigen::SparseMatrix<double> LinearConstraintSet::basis() const {
  std::vector<Eigen::Triplet<double>> entries;
  Eigen::Index col = 0;
  for (Eigen::Index d = 0; d < dimension_; ++d) {
    if (!is_constrained(d)) {
      entries.emplace_back(d, col++, 1.0);
      continue;
    }
    const auto& block = blocks_[owner_[d]];
    if (block.dofs.front() != d) continue;
    for (Eigen::Index c = 0; c < block.null_basis.cols(); ++c, ++col) {
      for (std::size_t r = 0; r < block.dofs.size(); ++r) {
        const double v = block.null_basis(static_cast<Eigen::Index>(r), c);
        if (v != 0.0) entries.emplace_back(block.dofs[r], col, v);
      }
    }
  }
  Eigen::SparseMatrix<double> z(dimension_, col);
  z.setFromTriplets(entries.begin(), entries.end());
  return z;
}

ReducedSystem reduce(const SymSparseMatrix& a, const Eigen::VectorXd& b,
                     const LinearConstraintSet& constraints) {
  if (a.rows() != constraints.dimension() || b.size() != a.rows()) {
    throw ArgumentError("matrix, vector and constraint dimensions differ");
  }
  ReducedSystem r;
  r.expansion = constraints.basis();
  const Eigen::SparseMatrix<double> zt = r.expansion.transpose();
  SymSparseMatrix product = zt * (a * r.expansion);
  const SymSparseMatrix product_t = product.transpose();
  r.matrix = 0.5 * (product + product_t);
  r.matrix.makeCompressed();
  r.rhs = zt * b;
  return r;
}

namespace {

// b - A x accumulated in extended precision.
Eigen::VectorXd residual(const SymSparseMatrix& a, const Eigen::VectorXd& b,
                         const Eigen::VectorXd& x) {
  std::vector<long double> r(static_cast<std::size_t>(b.size()));
  for (Eigen::Index i = 0; i < b.size(); ++i) r[static_cast<std::size_t>(i)] = b[i];
  for (Eigen::Index k = 0; k < a.outerSize(); ++k) {
    const long double xk = x[k];
    for (SymSparseMatrix::InnerIterator it(a, k); it; ++it) {
      r[static_cast<std::size_t>(it.row())] -= static_cast<long double>(it.value()) * xk;
    }
  }
  Eigen::VectorXd out(b.size());
  for (Eigen::Index i = 0; i < b.size(); ++i) out[i] = static_cast<double>(r[static_cast<std::size_t>(i)]);
  return out;
}

}  // namespace

struct SpdSolver::Impl {
  SolveOptions options;
  SymSparseMatrix a;
  Eigen::VectorXd scaling;  // D^{-1/2}
  SymSparseMatrix scaled;
  Eigen::SimplicialLDLT<SymSparseMatrix> ldlt;
  Eigen::ConjugateGradient<SymSparseMatrix, Eigen::Lower | Eigen::Upper,
                           Eigen::DiagonalPreconditioner<double>>
      cg;
  bool direct = true;
  double condition = 0.0;

  Eigen::VectorXd apply_inverse(const Eigen::VectorXd& b, int* iterations) const {
    const Eigen::VectorXd sb = scaling.cwiseProduct(b);
    Eigen::VectorXd y;
    if (direct) {
      y = ldlt.solve(sb);
      if (iterations) *iterations = 1;
    } else {
      y = cg.solve(sb);
      if (iterations) *iterations = static_cast<int>(cg.iterations());
      if (cg.info() != Eigen::Success) {
        throw SolverError(fmt::format("conjugate gradients did not converge ({} iterations, error {:.3g})",
                                      cg.iterations(), cg.error()));
      }
    }
    return scaling.cwiseProduct(y);
  }
};

SpdSolver::SpdSolver(const SymSparseMatrix& a, SolveOptions options) : impl_(std::make_unique<Impl>()) {
  impl_->options = options;
  impl_->a = a;
  const Eigen::Index n = a.rows();
  if (a.cols() != n) throw ArgumentError("solver needs a square matrix");
  const Eigen::VectorXd diag = a.diagonal();
  impl_->scaling.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(diag[i] > 0.0)) {
      throw SolverError(fmt::format(
          "matrix is not positive definite: diagonal entry {} is {:.6g}", i, diag[i]));
    }
    impl_->scaling[i] = 1.0 / std::sqrt(diag[i]);
  }
  impl_->scaled = impl_->scaling.asDiagonal() * a * impl_->scaling.asDiagonal();
  impl_->direct = n <= options.direct_limit;
  if (n == 0) return;
  if (impl_->direct) {
    impl_->ldlt.compute(impl_->scaled);
    if (impl_->ldlt.info() != Eigen::Success) {
      throw SolverError("sparse LDL^T factorization failed");
    }
    const double dmin = impl_->ldlt.vectorD().minCoeff();
    if (!(dmin > 0.0)) {
      throw SolverError(fmt::format(
          "matrix is not positive definite: LDL^T pivot {:.6g} (dimension {})", dmin, n));
    }
  } else {
    impl_->cg.setTolerance(options.cg_tolerance);
    impl_->cg.setMaxIterations(std::max<Eigen::Index>(1000, 10 * n));
    impl_->cg.compute(impl_->scaled);
  }

  if (options.estimate_condition && n > 0) {
    Eigen::VectorXd x = Eigen::VectorXd::Ones(n);
    for (Eigen::Index i = 0; i < n; ++i) x[i] += 0.5 * std::sin(static_cast<double>(i));
    Eigen::VectorXd y = x;
    double lambda_max = 0.0;
    double mu_max = 0.0;
    for (int step = 0; step < options.power_steps; ++step) {
      x.normalize();
      const Eigen::VectorXd ax = a * x;
      lambda_max = x.dot(ax);
      x = ax;
      y.normalize();
      const Eigen::VectorXd ay = impl_->apply_inverse(y, nullptr);
      mu_max = y.dot(ay);
      y = ay;
    }
    impl_->condition = lambda_max * mu_max;
  }
}

SpdSolver::~SpdSolver() = default;
SpdSolver::SpdSolver(SpdSolver&&) noexcept = default;
SpdSolver& SpdSolver::operator=(SpdSolver&&) noexcept = default;

double SpdSolver::condition_estimate() const { return impl_->condition; }

Eigen::VectorXd SpdSolver::solve(const Eigen::VectorXd& b, SolverReport* report) const {
  const auto start = std::chrono::steady_clock::now();
  const Eigen::Index n = impl_->a.rows();
  if (b.size() != n) throw ArgumentError("right-hand side has the wrong length");
  const double bnorm = b.norm();
  SolverReport rep;
  rep.method = impl_->direct ? SolverReport::Method::Direct : SolverReport::Method::Iterative;
  rep.condition_estimate = impl_->condition;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  if (bnorm > 0.0) {
    int iterations = 0;
    x = impl_->apply_inverse(b, &iterations);
    rep.iterations = iterations;
    Eigen::VectorXd r = residual(impl_->a, b, x);
    rep.relative_residual = r.norm() / bnorm;
    // Iterative refinement for badly conditioned systems.
    for (int k = 0; k < 3 && rep.relative_residual > 1e-13; ++k) {
      x += impl_->apply_inverse(r, &iterations);
      rep.iterations += iterations;
      r = residual(impl_->a, b, x);
      const double next = r.norm() / bnorm;
      if (!(next < rep.relative_residual)) {
        rep.relative_residual = std::min(rep.relative_residual, next);
        break;
      }
      rep.relative_residual = next;
    }
    rep.residual_ok = rep.relative_residual <= impl_->options.residual_tolerance;
    if (!rep.residual_ok && impl_->options.strict_residual) {
      throw SolverError(fmt::format("relative residual {:.3g} above tolerance {:.1g} (condition ~{:.3g})",
                                    rep.relative_residual, impl_->options.residual_tolerance,
                                    impl_->condition));
    }
  }
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (report) *report = rep;
  return x;
}

SolveResult solve(const SymSparseMatrix& a, const Eigen::VectorXd& b, SolveOptions options) {
  const auto start = std::chrono::steady_clock::now();
  SpdSolver solver(a, options);
  SolveResult result;
  result.x = solver.solve(b, &result.report);
  result.report.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

void write_matrix_market(const SymSparseMatrix& a, std::ostream& out) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << a.rows() << ' ' << a.cols() << ' ' << a.nonZeros() << '\n';
  for (Eigen::Index k = 0; k < a.outerSize(); ++k) {
    for (SymSparseMatrix::InnerIterator it(a, k); it; ++it) {
      out << fmt::format("{} {} {:.17g}\n", it.row() + 1, it.col() + 1, it.value());
    }
  }
}

}  // namespace plate
