#pragma once

#include <functional>

#include "lsdiv/common.hpp"

namespace lsdiv {

// Integration domain. Infinite domains are mapped to finite ones by the
// rational substitutions x = t/(1-t^2) (real line) and x = t/(1-t)
// (positive half-line) before the adaptive rule runs.
struct Domain {
  enum class Kind { real_line, half_line, finite };
  Kind kind = Kind::real_line;
  double a = 0.0;
  double b = 0.0;

  static Domain real_line() { return {Kind::real_line, 0.0, 0.0}; }
  static Domain half_line() { return {Kind::half_line, 0.0, 0.0}; }
  static Domain finite(double a, double b) { return {Kind::finite, a, b}; }
};

enum class QuadStatus { converged, max_subdivisions, diverged };

struct QuadratureResult {
  double value = 0.0;
  double abs_error_estimate = 0.0;
  int subdivisions = 0;
  QuadStatus status = QuadStatus::converged;

  bool converged() const { return status == QuadStatus::converged; }
  bool diverged() const { return status == QuadStatus::diverged; }
};

// Single Gauss-Kronrod 7-15 panel on [a,b]; err is the standard
// (200|G7-K15|)^{3/2} estimate.
double gk15(const std::function<double(double)>& f, double a, double b, double* err);

// Adaptive bisection with the 7-15 pair until the summed error estimate
// drops below target_tol or the subdivision cap (2^14) is reached.
// Divergence is flagged when the accumulated value exceeds 1e6 or when the
// contributions of dyadic shells closing in on an open endpoint keep
// growing by more than 10% for 10 consecutive halvings; the result then
// carries value = +inf and status = diverged.
QuadratureResult integrate(const std::function<double(double)>& f, const Domain& dom,
                           double target_tol);

// As integrate(), but throws AccuracyError (carrying the best estimate)
// when the subdivision cap is hit without convergence. Divergent integrals
// still come back as a result with value = +inf.
QuadratureResult integrate_or_throw(const std::function<double(double)>& f, const Domain& dom,
                                    double target_tol);

}  // namespace lsdiv
