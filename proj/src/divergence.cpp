#include "lsdiv/divergence.hpp"

#include <cmath>

namespace lsdiv {

namespace {

constexpr double kPi = 3.14159265358979323846;

double spd_log_det(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().array().log().sum();
}

struct WeibullCoords {
  double k, s;
};

// Exponential and Rayleigh scale families are the k = 1 and k = 2 members
// of the Weibull family; the Rayleigh standard density x exp(-x^2/2) sits
// at Weibull scale sqrt(2).
std::optional<WeibullCoords> as_weibull(const LocationScaleDensity& d) {
  const std::string& fam = d.base().family();
  const double s = d.g().scale1();
  if (fam == "exponential") return WeibullCoords{1.0, s};
  if (fam == "rayleigh") return WeibullCoords{2.0, s * std::sqrt(2.0)};
  if (fam == "weibull") return WeibullCoords{d.base().shape().at("k"), s};
  return std::nullopt;
}

bool same_density(const LocationScaleDensity& p, const LocationScaleDensity& q) {
  return p.base().name() == q.base().name() &&
         (p.g().loc() - q.g().loc()).cwiseAbs().maxCoeff() == 0.0 &&
         (p.g().scale() - q.g().scale()).cwiseAbs().maxCoeff() == 0.0;
}

double normal_pair_kl(const LocationScaleDensity& p, const LocationScaleDensity& q) {
  const Eigen::Index d = p.dim();
  if (d == 1) {
    const double dm = q.g().loc1() - p.g().loc1();
    const double v1 = p.g().scale1() * p.g().scale1();
    const double v2 = q.g().scale1() * q.g().scale1();
    return 0.5 * (dm * dm / v2 + v1 / v2 - std::log(v1 / v2) - 1.0);
  }
  const Matrix sigma1 = p.g().scale() * p.g().scale().transpose();
  const Matrix sigma2 = q.g().scale() * q.g().scale().transpose();
  const Vector dm = q.g().loc() - p.g().loc();
  Eigen::LLT<Matrix> llt(sigma2);
  const double tr = llt.solve(sigma1).trace();
  const double mah = dm.dot(llt.solve(dm));
  const double logdet = spd_log_det(sigma2) - spd_log_det(sigma1);
  return 0.5 * (tr + mah + logdet - d);
}

// Which probe domain ends are open (tails the integrand can blow up in).
struct ProbeEnds {
  bool neg_tail, pos_tail, at_zero;
};

ProbeEnds probe_ends(Support s) {
  switch (s) {
    case Support::half_line:
      return {false, true, true};
    case Support::unit_interval:
      return {false, false, false};
    case Support::real_line:
    default:
      return {true, true, false};
  }
}

// Dyadic tail probe: masses x * term(x) that keep growing toward an open
// end signal a divergent integral before quadrature burns subdivisions.
// The grid reaches 2^63 so that blowups far beyond the quadrature's
// subdivision horizon (wide scales inside the projection search box) are
// still caught.
bool tail_probe_diverges(const std::function<double(double)>& term, const ProbeEnds& ends) {
  auto grows = [&term](int k_max, auto point_of) {
    int run = 0;
    double prev = 0.0;
    for (int k = 0; k <= k_max; ++k) {
      const double x = point_of(k);
      const double mass = std::abs(x) * term(x);
      if (std::isinf(mass) && mass > 0.0) return true;
      if (mass > 0.0 && (run == 0 || mass >= 1.01 * prev)) {
        prev = mass;
        if (++run >= 7) return true;
      } else {
        run = mass > 0.0 ? 1 : 0;
        prev = mass;
      }
    }
    return false;
  };
  if (ends.pos_tail && grows(63, [](int k) { return std::pow(2.0, k); })) return true;
  if (ends.neg_tail && grows(63, [](int k) { return -std::pow(2.0, k); })) return true;
  if (ends.at_zero && grows(48, [](int k) { return std::pow(2.0, -k - 1); })) return true;
  return false;
}

// supp(q) subset of supp(p), accounting for the location of interval
// supports.
bool support_subset(const LocationScaleDensity& q, const LocationScaleDensity& p) {
  const Support sp = p.base().support();
  const Support sq = q.base().support();
  if (sp == Support::real_line) return true;
  if (sq == Support::real_line) return false;
  if (sp == Support::half_line) {
    if (sq == Support::half_line) return true;
    return q.g().loc().minCoeff() >= 0.0;  // shifted unit interval
  }
  // p lives on a unit interval
  return sq == Support::unit_interval &&
         (q.g().loc() - p.g().loc()).cwiseAbs().maxCoeff() == 0.0;
}

Domain integration_domain(const LocationScaleDensity& p) {
  switch (p.base().support()) {
    case Support::half_line:
      return Domain::half_line();
    case Support::unit_interval: {
      const double lo = p.g().loc1();
      return Domain::finite(lo, lo + 1.0);
    }
    case Support::real_line:
    default:
      return Domain::real_line();
  }
}

void check_pair(const LocationScaleDensity& p, const LocationScaleDensity& q) {
  if (p.dim() != q.dim()) throw std::domain_error("divergence: dimension mismatch");
  if (!p.base().is_regular() || !q.base().is_regular()) {
    throw std::domain_error("divergence: non-regular family refused");
  }
}

}  // namespace

std::string method_name(Method m) {
  switch (m) {
    case Method::closed_form:
      return "closed_form";
    case Method::quadrature:
      return "quadrature";
    case Method::monte_carlo:
      return "monte_carlo";
    case Method::auto_select:
    default:
      return "auto";
  }
}

bool has_kl_closed(const LocationScaleDensity& p, const LocationScaleDensity& q) {
  if (p.dim() != q.dim()) return false;
  const std::string& fp = p.base().family();
  const std::string& fq = q.base().family();
  if (fp == "normal" && fq == "normal") return true;
  if (p.dim() != 1) return false;
  if (fp == "lognormal" && fq == "lognormal") return true;
  if (fp == "halfnormal" && fq == "exponential") return true;
  auto weib = [](const std::string& f) {
    return f == "exponential" || f == "rayleigh" || f == "weibull";
  };
  return weib(fp) && weib(fq);
}

double weibull_kl(double k1, double s1, double k2, double s2) {
  if (!(k1 > 0.0 && k2 > 0.0 && s1 > 0.0 && s2 > 0.0)) {
    throw std::domain_error("weibull_kl: parameters must be positive");
  }
  return std::log(k1) - k1 * std::log(s1) - std::log(k2) + k2 * std::log(s2) +
         (k1 - k2) * (std::log(s1) - kEulerGamma / k1) +
         std::pow(s1 / s2, k2) * std::tgamma(k2 / k1 + 1.0) - 1.0;
}

double halfnormal_exponential_kl(double s1, double s2) {
  if (!(s1 > 0.0 && s2 > 0.0)) {
    throw std::domain_error("halfnormal_exponential_kl: scales must be positive");
  }
  return 0.5 * (2.0 * std::log(s2 / s1) + std::log(2.0 / kPi) - 1.0) +
         std::sqrt(2.0 / kPi) * s1 / s2;
}

double itakura_saito(double a, double b) {
  // natural parameters may be jointly negative; only the ratio matters
  if (!(a * b > 0.0)) throw std::domain_error("itakura_saito: arguments must share a sign");
  const double r = a / b;
  return r - std::log(r) - 1.0;
}

double rayleigh_kl(double sigma_sq1, double sigma_sq2) {
  return itakura_saito(sigma_sq1, sigma_sq2);
}

double lognormal_kl(double mu1, double sigma1, double mu2, double sigma2) {
  if (!(sigma1 > 0.0 && sigma2 > 0.0)) {
    throw std::domain_error("lognormal_kl: sigmas must be positive");
  }
  const double dm = mu2 - mu1;
  const double v1 = sigma1 * sigma1;
  const double v2 = sigma2 * sigma2;
  return 0.5 * (dm * dm / v2 + v1 / v2 - std::log(v1 / v2) - 1.0);
}

double kl_closed(const LocationScaleDensity& p, const LocationScaleDensity& q) {
  check_pair(p, q);
  if (!has_kl_closed(p, q)) {
    throw CapabilityError("no closed-form KLD registered for (" + p.base().name() + ", " +
                          q.base().name() + "); use quadrature or Monte Carlo");
  }
  if (same_density(p, q)) return 0.0;
  const std::string& fp = p.base().family();
  const std::string& fq = q.base().family();
  if (fp == "normal") return normal_pair_kl(p, q);
  if (fp == "lognormal" && fq == "lognormal") {
    return lognormal_kl(std::log(p.g().scale1()), p.base().shape().at("sigma"),
                        std::log(q.g().scale1()), q.base().shape().at("sigma"));
  }
  if (fp == "halfnormal") {
    return halfnormal_exponential_kl(p.g().scale1(), q.g().scale1());
  }
  const auto wp = as_weibull(p);
  const auto wq = as_weibull(q);
  return weibull_kl(wp->k, wp->s, wq->k, wq->s);
}

DivergenceValue f_divergence_quadrature(const LocationScaleDensity& p,
                                        const LocationScaleDensity& q, const FGenerator& f,
                                        double tol) {
  check_pair(p, q);
  if (p.dim() != 1) throw CapabilityError("quadrature divergences are d=1 only");
  DivergenceValue out;
  out.method = Method::quadrature;
  if (f.superlinear && !support_subset(q, p)) {
    out.value = kInf;
    out.diverged = true;
    return out;
  }
  auto term = [&p, &q, &f](double x) { return f_term(f, p.log_pdf1(x), q.log_pdf1(x)); };
  if (tail_probe_diverges(term, probe_ends(p.base().support()))) {
    out.value = kInf;
    out.diverged = true;
    return out;
  }
  QuadratureResult res = integrate(term, integration_domain(p), tol);
  if (res.diverged()) {
    out.value = kInf;
    out.diverged = true;
    return out;
  }
  if (!res.converged()) {
    throw AccuracyError("divergence quadrature did not converge", res.value);
  }
  out.value = res.value;
  return out;
}

DivergenceValue f_divergence(const LocationScaleDensity& p, const LocationScaleDensity& q,
                             const FGenerator& f, const DivergenceOptions& opt) {
  check_pair(p, q);
  const bool closed_ok = (f.name == "kl" && has_kl_closed(p, q)) ||
                         (f.name == "reverse_kl" && has_kl_closed(q, p));
  Method method = opt.method;
  if (method == Method::auto_select) {
    if (closed_ok) {
      method = Method::closed_form;
    } else if (p.dim() == 1) {
      method = Method::quadrature;
    } else {
      method = Method::monte_carlo;
    }
  }
  switch (method) {
    case Method::closed_form: {
      if (f.name != "kl" && f.name != "reverse_kl") {
        throw CapabilityError("closed forms are registered for the KL generator only");
      }
      DivergenceValue out;
      out.value = f.name == "kl" ? kl_closed(p, q) : kl_closed(q, p);
      out.method = Method::closed_form;
      out.diverged = std::isinf(out.value);
      return out;
    }
    case Method::quadrature:
      return f_divergence_quadrature(p, q, f, opt.quad_tol);
    case Method::monte_carlo:
    default: {
      if (!opt.seed.has_value()) {
        throw std::invalid_argument("Monte Carlo divergence needs a seed");
      }
      SampleSet s = SampleSet::from_standard(p.base_ptr(), opt.mc_samples, *opt.seed);
      const EstimatorKind kind =
          f.differentiable_at_1 && f.f_prime ? EstimatorKind::bregman : EstimatorKind::plugin;
      Estimate e = estimate_reduced(p.g(), q.g(), p.base_ptr(), q.base_ptr(), f, s, kind,
                                    opt.partitions);
      DivergenceValue out;
      out.value = e.value;
      out.method = Method::monte_carlo;
      out.stderr_ = e.stderr_;
      out.diverged = std::isinf(e.value);
      return out;
    }
  }
}

double mahalanobis(const Vector& mu1, const Vector& mu2, const SpdMatrix& q) {
  if (mu1.size() != mu2.size() || mu1.size() != q.dim()) {
    throw std::domain_error("mahalanobis: dimension mismatch");
  }
  const Vector d = mu2 - mu1;
  return 0.5 * d.dot(q.m() * d);
}

double burg(const SpdMatrix& s1, const SpdMatrix& s2) {
  if (s1.dim() != s2.dim()) throw std::domain_error("burg: dimension mismatch");
  Eigen::LLT<Matrix> llt(s2.m());
  const double tr = llt.solve(s1.m()).trace();
  const double logdet = spd_log_det(s1.m()) - spd_log_det(s2.m());
  return 0.5 * (tr - s1.dim() - logdet);
}

double entropy_shift(double h_std, const GroupElement& g) {
  return h_std + log_abs_det(g.scale());
}

double cross_entropy_shift(double hx_std, const GroupElement& g) {
  return hx_std + log_abs_det(g.scale());
}

double differential_entropy(const LocationScaleDensity& p, double tol) {
  if (p.dim() != 1) throw CapabilityError("differential_entropy: d=1 only");
  auto term = [&p](double x) {
    const double lp = p.log_pdf1(x);
    if (std::isinf(lp) && lp < 0.0) return 0.0;
    return -std::exp(lp) * lp;
  };
  return integrate_or_throw(term, integration_domain(p), tol).value;
}

double cross_entropy(const LocationScaleDensity& p, const LocationScaleDensity& q, double tol) {
  if (p.dim() != 1 || q.dim() != 1) throw CapabilityError("cross_entropy: d=1 only");
  auto term = [&p, &q](double x) {
    const double lp = p.log_pdf1(x);
    if (std::isinf(lp) && lp < 0.0) return 0.0;
    return -std::exp(lp) * q.log_pdf1(x);
  };
  QuadratureResult res = integrate(term, integration_domain(p), tol);
  if (res.diverged()) return kInf;
  if (!res.converged()) throw AccuracyError("cross_entropy did not converge", res.value);
  return res.value;
}

double gaussian_mutual_information(double rho) {
  if (!(std::abs(rho) < 1.0)) {
    throw std::domain_error("gaussian_mutual_information: |rho| must be < 1");
  }
  return -0.5 * std::log1p(-rho * rho);
}

double MiInvarianceReport::combined_stderr() const {
  return std::sqrt(base.stderr_ * base.stderr_ + transformed.stderr_ * transformed.stderr_);
}

bool MiInvarianceReport::consistent(double band) const {
  return std::abs(base.value - transformed.value) <= band * combined_stderr();
}

namespace {

// Plug-in MC estimate of MI for a bivariate Gaussian with moments
// (mu, a1, a2, rho), sampling the joint on substream block `stream`.
Estimate gaussian_mi_estimate(double rho, AffineMap t1, AffineMap t2, int m, std::uint64_t seed,
                              std::uint64_t stream) {
  const double a1 = t1.a, a2 = t2.a;
  const double rho_t = (a1 * a2 >= 0 ? 1.0 : -1.0) * rho;
  const double s1 = std::abs(a1), s2 = std::abs(a2);
  const double om = 1.0 - rho_t * rho_t;
  std::vector<double> terms(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) {
    CounterRng rng = CounterRng::substream(seed, stream + static_cast<std::uint64_t>(j));
    const double z1 = rng.next_normal();
    const double z2 = rho * z1 + std::sqrt(1.0 - rho * rho) * rng.next_normal();
    const double x1 = t1.a * z1 + t1.b;
    const double x2 = t2.a * z2 + t2.b;
    const double u = (x1 - t1.b) / s1;
    const double v = (x2 - t2.b) / s2;
    const double log_joint = -std::log(2.0 * kPi * s1 * s2) - 0.5 * std::log(om) -
                             (u * u - 2.0 * rho_t * u * v + v * v) / (2.0 * om);
    const double log_marg = -std::log(2.0 * kPi * s1 * s2) - 0.5 * (u * u + v * v);
    terms[j] = log_joint - log_marg;
  }
  Estimate e;
  e.m = m;
  e.kind = EstimatorKind::plugin;
  e.value = pairwise_sum(terms) / m;
  std::vector<double> sq(terms.size());
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const double d = terms[i] - e.value;
    sq[i] = d * d;
  }
  if (m > 1) e.stderr_ = std::sqrt(pairwise_sum(sq) / (m - 1) / m);
  return e;
}

}  // namespace

MiInvarianceReport mi_invariance_check(double rho, AffineMap t1, AffineMap t2, int m,
                                       std::uint64_t seed) {
  if (t1.a == 0.0 || t2.a == 0.0) {
    throw std::domain_error("mi_invariance_check: affine maps must be invertible");
  }
  MiInvarianceReport rep;
  rep.analytic = gaussian_mutual_information(rho);
  rep.base = gaussian_mi_estimate(rho, AffineMap{}, AffineMap{}, m, seed, 0);
  rep.transformed =
      gaussian_mi_estimate(rho, t1, t2, m, seed, static_cast<std::uint64_t>(m) + 1);
  return rep;
}

}  // namespace lsdiv
