#include "lsdiv/generators.hpp"

#include <cmath>

namespace lsdiv {

namespace {

bool neg_inf(double x) { return std::isinf(x) && x < 0.0; }

FGenerator kl_generator() {
  FGenerator g;
  g.name = "kl";
  g.f = [](double u) { return -std::log(u); };
  g.f_log = [](double w) { return -w; };
  g.f_prime = [](double u) { return -1.0 / u; };
  g.weighted = [](double lp, double lq) {
    const double p = std::exp(lp);
    if (p == 0.0) return 0.0;
    return p * (lp - lq);
  };
  return g;
}

FGenerator reverse_kl_generator() {
  FGenerator g;
  g.name = "reverse_kl";
  g.f = [](double u) { return u == 0.0 ? 0.0 : u * std::log(u); };
  g.f_log = [](double w) { return neg_inf(w) ? 0.0 : w * std::exp(w); };
  g.f_prime = [](double u) { return std::log(u) + 1.0; };
  g.weighted = [](double lp, double lq) {
    const double q = std::exp(lq);
    if (q == 0.0) return 0.0;
    return q * (lq - lp);
  };
  g.superlinear = true;
  return g;
}

FGenerator hellinger2_generator() {
  FGenerator g;
  g.name = "hellinger2";
  g.f = [](double u) {
    const double r = std::sqrt(u) - 1.0;
    return 0.5 * r * r;
  };
  g.f_log = [](double w) {
    const double r = std::expm1(0.5 * w);
    return 0.5 * r * r;
  };
  g.f_prime = [](double u) { return 0.5 * (1.0 - 1.0 / std::sqrt(u)); };
  g.weighted = [](double lp, double lq) {
    // p f(q/p) = (sqrt(q) - sqrt(p))^2 / 2 identically
    const double d = std::exp(0.5 * lq) - std::exp(0.5 * lp);
    return 0.5 * d * d;
  };
  return g;
}

FGenerator chi2_generator() {
  FGenerator g;
  g.name = "chi2";
  g.f = [](double u) { return (u - 1.0) * (u - 1.0); };
  g.f_log = [](double w) {
    const double r = std::expm1(w);
    return r * r;
  };
  g.f_prime = [](double u) { return 2.0 * (u - 1.0); };
  g.weighted = [](double lp, double lq) {
    if (neg_inf(lp)) return neg_inf(lq) ? 0.0 : kInf;
    const double w = lq - lp;
    if (w < 30.0) {
      const double r = std::expm1(w);
      return std::exp(lp) * r * r;
    }
    return std::exp(2.0 * lq - lp) - 2.0 * std::exp(lq) + std::exp(lp);
  };
  g.superlinear = true;
  return g;
}

FGenerator tv_generator() {
  FGenerator g;
  g.name = "tv";
  g.f = [](double u) { return 0.5 * std::abs(u - 1.0); };
  g.f_log = [](double w) { return 0.5 * std::abs(std::expm1(w)); };
  g.f_prime = nullptr;
  g.weighted = [](double lp, double lq) {
    return 0.5 * std::abs(std::exp(lq) - std::exp(lp));
  };
  g.differentiable_at_1 = false;
  return g;
}

// f_a(u) = 4/(1-a^2) (1 - u^{(1+a)/2}); a = -1, 1 degenerate to kl and
// reverse_kl.
FGenerator alpha_generator(double a) {
  if (a == -1.0) return kl_generator();
  if (a == 1.0) return reverse_kl_generator();
  FGenerator g;
  g.name = "alpha(a=" + std::to_string(a) + ")";
  const double c = 4.0 / (1.0 - a * a);
  const double e = 0.5 * (1.0 + a);
  g.f = [c, e](double u) { return c * (1.0 - std::pow(u, e)); };
  g.f_log = [c, e](double w) { return c * -std::expm1(e * w); };
  g.f_prime = [c, e](double u) { return -c * e * std::pow(u, e - 1.0); };
  g.weighted = [c, e](double lp, double lq) {
    if (neg_inf(lp)) {
      if (neg_inf(lq)) return 0.0;
      return e < 1.0 ? 0.0 : kInf;  // sublinear generators pick up no q-mass
    }
    const double w = lq - lp;
    if (std::abs(w) < 30.0) return -c * std::exp(lp) * std::expm1(e * w);
    return c * (std::exp(lp) - std::exp((1.0 - e) * lp + e * lq));
  };
  g.superlinear = a > 1.0;
  return g;
}

}  // namespace

FGenerator conjugate(const FGenerator& gen) {
  FGenerator g;
  g.name = gen.name == "kl" ? "reverse_kl"
           : gen.name == "reverse_kl" ? "kl"
                                      : "conjugate(" + gen.name + ")";
  auto f = gen.f;
  g.f = [f](double u) { return u == 0.0 ? 0.0 : u * f(1.0 / u); };
  auto fl = gen.f_log;
  g.f_log = [fl](double w) { return neg_inf(w) ? 0.0 : std::exp(w) * fl(-w); };
  if (gen.f_prime) {
    auto fp = gen.f_prime;
    g.f_prime = [f, fp](double u) { return f(1.0 / u) - fp(1.0 / u) / u; };
  }
  if (gen.weighted) {
    // p f*(q/p) = q f(p/q): the conjugate swaps the weighted arguments
    auto wt = gen.weighted;
    g.weighted = [wt](double lp, double lq) { return wt(lq, lp); };
  }
  g.differentiable_at_1 = gen.differentiable_at_1;
  // the conjugate grows superlinearly exactly when f blows up at 0+
  g.superlinear = std::isinf(gen.f(0.0));
  return g;
}

FGenerator make_generator(const std::string& spec) {
  if (spec == "kl") return kl_generator();
  if (spec == "reverse_kl") return reverse_kl_generator();
  if (spec == "hellinger2") return hellinger2_generator();
  if (spec == "chi2") return chi2_generator();
  if (spec == "tv") return tv_generator();
  if (spec.rfind("alpha(", 0) == 0 && spec.back() == ')') {
    const std::string inner = spec.substr(6, spec.size() - 7);
    if (inner.rfind("a=", 0) == 0) {
      size_t consumed = 0;
      const double a = std::stod(inner.substr(2), &consumed);
      if (consumed == inner.size() - 2) return alpha_generator(a);
    }
    throw std::invalid_argument("alpha generator expects alpha(a=<value>)");
  }
  throw std::invalid_argument("unknown generator: " + spec);
}

void validate_generator(const FGenerator& gen) {
  if (!gen.f || !gen.f_log) throw std::domain_error(gen.name + ": missing f");
  if (std::abs(gen.f(1.0)) > 1e-12) {
    throw std::domain_error(gen.name + ": f(1) must be 0");
  }
  if (std::abs(gen.f_log(0.0)) > 1e-12) {
    throw std::domain_error(gen.name + ": f_log(0) must be 0");
  }
  static const double grid[] = {0.05, 0.2, 0.5, 0.8, 1.0, 1.3, 2.0, 4.0, 9.0, 25.0};
  for (double u : grid) {
    for (double v : grid) {
      const double mid = gen.f(0.5 * (u + v));
      const double chord = 0.5 * (gen.f(u) + gen.f(v));
      if (mid > chord + 1e-9) {
        throw std::domain_error(gen.name + ": midpoint convexity violated");
      }
    }
  }
}

double f_term(const FGenerator& gen, double log_p, double log_q) {
  if (gen.weighted) return gen.weighted(log_p, log_q);
  if (neg_inf(log_p)) return 0.0;
  const double val = gen.f_log(log_q - log_p);
  if (val == 0.0) return 0.0;
  const double p = std::exp(log_p);
  if (p == 0.0) return 0.0;  // custom generators: underflowed weight wins
  return p * val;
}

}  // namespace lsdiv
