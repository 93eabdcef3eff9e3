#include "lsdiv/estimators.hpp"

#include <cmath>

namespace lsdiv {

namespace {

double pairwise_range(const double* data, std::size_t n) {
  if (n <= 8) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += data[i];
    return acc;
  }
  const std::size_t half = n / 2;
  return pairwise_range(data, half) + pairwise_range(data + half, n - half);
}

Estimate summarize(const std::vector<double>& terms, EstimatorKind kind, int partitions) {
  Estimate e;
  e.m = static_cast<int>(terms.size());
  e.kind = kind;
  if (terms.empty()) return e;
  e.value = pairwise_sum(terms, partitions) / e.m;
  if (!std::isfinite(e.value)) {
    e.stderr_ = kInf;
    return e;
  }
  std::vector<double> sq(terms.size());
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const double d = terms[i] - e.value;
    sq[i] = d * d;
  }
  if (e.m > 1) {
    const double var = pairwise_sum(sq, partitions) / (e.m - 1);
    e.stderr_ = std::sqrt(std::max(var, 0.0) / e.m);
  }
  return e;
}

double bregman_term(const FGenerator& f, double w, double fp1) {
  if (std::isinf(w) && w > 0.0) return kInf;
  double b = f.f_log(w) - std::expm1(w) * fp1;
  // inf - inf from the convex branch: the Bregman term itself diverges
  if (std::isnan(b)) return kInf;
  if (b < 0.0) {
    if (b < -1e-12) {
      throw std::logic_error("bregman term negative beyond roundoff: " + std::to_string(b));
    }
    b = 0.0;
  }
  return b;
}

}  // namespace

double pairwise_sum(const double* data, std::size_t n) { return pairwise_range(data, n); }

double pairwise_sum(const std::vector<double>& v, int partitions) {
  if (partitions <= 1 || v.size() <= 1) return pairwise_range(v.data(), v.size());
  const std::size_t n = v.size();
  const std::size_t p = std::min<std::size_t>(partitions, n);
  std::vector<double> partial(p);
  for (std::size_t k = 0; k < p; ++k) {
    const std::size_t lo = n * k / p;
    const std::size_t hi = n * (k + 1) / p;
    partial[k] = pairwise_range(v.data() + lo, hi - lo);
  }
  return pairwise_range(partial.data(), partial.size());
}

SampleSet SampleSet::from_standard(const DensityPtr& r, int m, std::uint64_t seed) {
  if (!r) throw std::domain_error("SampleSet: null proposal");
  if (m < 0) throw std::domain_error("SampleSet: m must be >= 0");
  SampleSet s;
  s.seed = seed;
  s.m = m;
  s.proposal = r->name();
  s.draws.resize(r->dim(), m);
  for (int j = 0; j < m; ++j) {
    CounterRng rng = CounterRng::substream(seed, static_cast<std::uint64_t>(j));
    r->sample(rng, s.draws.col(j));
  }
  return s;
}

SampleSet SampleSet::from(const LocationScaleDensity& r, int m, std::uint64_t seed) {
  if (m < 0) throw std::domain_error("SampleSet: m must be >= 0");
  SampleSet s;
  s.seed = seed;
  s.m = m;
  s.proposal = r.base().name() + "@g";
  s.draws.resize(r.dim(), m);
  for (int j = 0; j < m; ++j) {
    CounterRng rng = CounterRng::substream(seed, static_cast<std::uint64_t>(j));
    r.sample(rng, s.draws.col(j));
  }
  return s;
}

Estimate estimate_importance(const LocationScaleDensity& p, const LocationScaleDensity& q,
                             const FGenerator& f, const LocationScaleDensity& r,
                             const SampleSet& s, int partitions) {
  if (p.dim() != q.dim() || p.dim() != r.dim() || s.draws.rows() != p.dim()) {
    throw std::domain_error("estimate_importance: dimension mismatch");
  }
  std::vector<double> terms(static_cast<std::size_t>(s.m));
  for (int j = 0; j < s.m; ++j) {
    const Vector x = s.draws.col(j);
    const double lr = r.log_pdf(x);
    if (std::isinf(lr) && lr < 0.0) {
      throw std::runtime_error("estimate_importance: proposal density is zero at sample index " +
                               std::to_string(j));
    }
    const double t = f_term(f, p.log_pdf(x), q.log_pdf(x));
    terms[j] = t == 0.0 ? 0.0 : t * std::exp(-lr);
  }
  return summarize(terms, EstimatorKind::importance, partitions);
}

Estimate estimate_plugin(const LocationScaleDensity& p, const LocationScaleDensity& q,
                         const FGenerator& f, const SampleSet& s, int partitions) {
  if (p.dim() != q.dim() || s.draws.rows() != p.dim()) {
    throw std::domain_error("estimate_plugin: dimension mismatch");
  }
  std::vector<double> terms(static_cast<std::size_t>(s.m));
  for (int j = 0; j < s.m; ++j) {
    const Vector x = s.draws.col(j);
    terms[j] = f.f_log(q.log_pdf(x) - p.log_pdf(x));
  }
  return summarize(terms, EstimatorKind::plugin, partitions);
}

Estimate estimate_bregman(const LocationScaleDensity& p, const LocationScaleDensity& q,
                          const FGenerator& f, const SampleSet& s, int partitions) {
  if (!f.differentiable_at_1 || !f.f_prime) {
    throw CapabilityError(f.name + ": Bregman form needs a generator differentiable at 1");
  }
  if (p.dim() != q.dim() || s.draws.rows() != p.dim()) {
    throw std::domain_error("estimate_bregman: dimension mismatch");
  }
  const double fp1 = f.f_prime(1.0);
  std::vector<double> terms(static_cast<std::size_t>(s.m));
  for (int j = 0; j < s.m; ++j) {
    const Vector x = s.draws.col(j);
    terms[j] = bregman_term(f, q.log_pdf(x) - p.log_pdf(x), fp1);
  }
  return summarize(terms, EstimatorKind::bregman, partitions);
}

Estimate estimate_reduced(const GroupElement& g1, const GroupElement& g2,
                          const DensityPtr& base_p, const DensityPtr& base_q,
                          const FGenerator& f, const SampleSet& s, EstimatorKind kind,
                          int partitions) {
  if (!base_p || !base_q) throw std::domain_error("estimate_reduced: null base density");
  LocationScaleDensity p_std(base_p, GroupElement::identity(g1.dim()));
  LocationScaleDensity q_h(base_q, canonical_reduce(g1, g2));
  switch (kind) {
    case EstimatorKind::bregman:
      return estimate_bregman(p_std, q_h, f, s, partitions);
    case EstimatorKind::plugin:
    case EstimatorKind::importance:
    default: {
      Estimate e = estimate_plugin(p_std, q_h, f, s, partitions);
      e.kind = kind;
      return e;
    }
  }
}

}  // namespace lsdiv
