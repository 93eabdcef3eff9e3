#pragma once

#include <cstdint>
#include <vector>

#include "lsdiv/densities.hpp"
#include "lsdiv/generators.hpp"

namespace lsdiv {

// Deterministic pairwise (tree) summation. For a fixed partition count the
// result is independent of evaluation order.
double pairwise_sum(const double* data, std::size_t n);
double pairwise_sum(const std::vector<double>& v, int partitions = 1);

// A frozen set of i.i.d. draws from a declared proposal density. Sample j
// uses counter substream j of the seed, so the set is bit-reproducible and
// reusable across estimator calls.
struct SampleSet {
  std::uint64_t seed = 0;
  int m = 0;
  std::string proposal;
  Matrix draws;  // d x m, one draw per column

  static SampleSet from_standard(const DensityPtr& r, int m, std::uint64_t seed);
  static SampleSet from(const LocationScaleDensity& r, int m, std::uint64_t seed);
};

enum class EstimatorKind { importance, plugin, bregman };

struct Estimate {
  double value = 0.0;
  double stderr_ = 0.0;  // sample standard deviation / sqrt(m)
  int m = 0;
  EstimatorKind kind = EstimatorKind::importance;
};

// (1/m) sum (p/r)(x_i) f(q(x_i)/p(x_i)) over draws x_i ~ r.
// Throws std::runtime_error (with the sample index) if r vanishes at a draw.
Estimate estimate_importance(const LocationScaleDensity& p, const LocationScaleDensity& q,
                             const FGenerator& f, const LocationScaleDensity& r,
                             const SampleSet& s, int partitions = 1);

// Importance estimator specialised to r = p: (1/m) sum f(q(x_i)/p(x_i)).
Estimate estimate_plugin(const LocationScaleDensity& p, const LocationScaleDensity& q,
                         const FGenerator& f, const SampleSet& s, int partitions = 1);

// (1/m) sum B_f(q(x_i)/p(x_i) : 1) with draws from p. Every term is a
// scalar Bregman divergence, hence the estimate is non-negative exactly.
// Requires a generator differentiable at 1 (CapabilityError otherwise).
Estimate estimate_bregman(const LocationScaleDensity& p, const LocationScaleDensity& q,
                          const FGenerator& f, const SampleSet& s, int partitions = 1);

// Estimates I_f(p_{g1} : q_{g2}) as I_f(p : q_{g1^{-1}g2}) on one FIXED
// sample set drawn from the standard density of p. With S held fixed the
// map (g1, g2) -> estimate is deterministic, so divergence comparisons
// never flip between evaluations.
Estimate estimate_reduced(const GroupElement& g1, const GroupElement& g2,
                          const DensityPtr& base_p, const DensityPtr& base_q,
                          const FGenerator& f, const SampleSet& s,
                          EstimatorKind kind = EstimatorKind::bregman, int partitions = 1);

}  // namespace lsdiv
