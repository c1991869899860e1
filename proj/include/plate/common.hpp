#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>

namespace plate {

using Point2 = Eigen::Vector2d;
using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Value, gradient and Hessian of a scalar field at one point.
struct Jet {
  double value = 0.0;
  Vec2 grad = Vec2::Zero();
  Mat2 hess = Mat2::Zero();
};

/// Twice differentiable field with exact derivatives.
using AnalyticField = std::function<Jet(const Point2&)>;
using ScalarField = std::function<double(const Point2&)>;

// Error hierarchy. Everything thrown by the library derives from Error.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ArgumentError : public Error {
 public:
  using Error::Error;
};

class CapacityError : public Error {
 public:
  using Error::Error;
};

class NotFoundError : public Error {
 public:
  using Error::Error;
};

class ElementQualityError : public Error {
 public:
  using Error::Error;
};

class ConstraintError : public Error {
 public:
  ConstraintError(const std::string& what, std::size_t block)
      : Error(what), block_(block) {}
  [[nodiscard]] std::size_t block() const { return block_; }

 private:
  std::size_t block_;
};

class SolverError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

/// Number of worker threads: PLATE_NUM_THREADS if set, else hardware
/// concurrency. Forced to 1 while deterministic mode is on.
int thread_count();
void set_deterministic(bool on);
bool deterministic();

/// Runs body(i) for i in [0, n). Each index must only write its own output
/// slot; results are then independent of the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace plate
