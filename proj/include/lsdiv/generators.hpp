#pragma once

#include <functional>
#include <string>

#include "lsdiv/common.hpp"

namespace lsdiv {

// Convex generator f of an f-divergence: f(1) = 0, strictly convex at 1.
// f_log evaluates f(exp(w)) so that density ratios can stay in log space;
// f_prime may be empty for non-smooth generators (total variation).
struct FGenerator {
  std::string name;
  std::function<double(double)> f;
  std::function<double(double)> f_log;    // f_log(w) = f(exp(w))
  std::function<double(double)> f_prime;  // empty when not differentiable
  // weighted(lp, lq) = exp(lp) * f(exp(lq - lp)), written per generator so
  // that tail underflow of either density cannot turn the product into
  // 0 * inf. Optional; f_term falls back to a guarded generic formula.
  std::function<double(double, double)> weighted;
  bool differentiable_at_1 = true;
  // f(u)/u unbounded as u -> inf; such generators pick up mass from regions
  // where the first density vanishes and the second does not.
  bool superlinear = false;
};

// Conjugate generator f*(u) = u f(1/u); swaps the divergence's arguments.
FGenerator conjugate(const FGenerator& gen);

// Registry: "kl", "reverse_kl", "hellinger2", "chi2", "tv", "alpha(a=0.5)".
FGenerator make_generator(const std::string& spec);

// Checks f(1) = 0 within 1e-12 and midpoint convexity on a (u,v) grid
// within 1e-9. Throws std::domain_error on violation.
void validate_generator(const FGenerator& gen);

// One integrand/estimator term p * f(q/p) from log densities, computed so
// that underflow of either density does not poison the result. p = 0
// contributes zero; q = 0 against p > 0 propagates f(0+) (possibly +inf).
double f_term(const FGenerator& gen, double log_p, double log_q);

}  // namespace lsdiv
