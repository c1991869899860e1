#include "plate/system.hpp"

namespace plate {

Solution solve_system(const PlateSystem& system, SolveOptions options) {
  const ReducedSystem reduced = reduce(system.matrix, system.rhs, system.constraints);
  Solution s;
  const SolveResult r = solve(reduced.matrix, reduced.rhs, options);
  s.coefficients = reduced.expand(r.x);
  s.report = r.report;
  s.energy = 0.5 * quadratic_form(system.matrix, s.coefficients) - system.rhs.dot(s.coefficients);
  return s;
}

}  // namespace plate
