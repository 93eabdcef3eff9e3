#include "lsdiv/divergence.hpp"

#include <cmath>

#include "doctest.h"
#include "oracles.hpp"

using namespace lsdiv;

namespace {

LocationScaleDensity seeded_mvn(int d, CounterRng& rng, Vector* mu_out, Matrix* sigma_out) {
  Vector mu(d);
  for (int i = 0; i < d; ++i) mu(i) = 2.0 * (rng.next_unit() - 0.5);
  Matrix a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = 0.5 * rng.next_normal();
  Matrix sigma = a * a.transpose() + 0.6 * Matrix::Identity(d, d);
  if (mu_out) *mu_out = mu;
  if (sigma_out) *sigma_out = sigma;
  return LocationScaleDensity(make_standard_density("mvn", {}, d),
                              GroupElement(mu, spd_sqrt(SpdMatrix(sigma))));
}

}  // namespace

TEST_SUITE("divergence") {
  TEST_CASE("closed-form normal KLD") {
    CHECK(kl_closed(parse_density("normal"), parse_density("normal")) == 0.0);
    CHECK(kl_closed(parse_density("normal(l=0,s=1)"), parse_density("normal(l=1,s=1)")) ==
          doctest::Approx(0.5).epsilon(1e-14));

    // generic coordinates against the canonical-substitution formula
    const double m1 = 0.3, s1 = 1.7, m2 = -1.1, s2 = 0.8;
    const double expected = (m2 - m1) * (m2 - m1) / (2 * s2 * s2) +
                            0.5 * (s1 * s1 / (s2 * s2) - std::log(s1 * s1 / (s2 * s2)) - 1);
    CHECK(kl_closed(parse_density("normal(l=0.3,s=1.7)"), parse_density("normal(l=-1.1,s=0.8)")) ==
          doctest::Approx(expected).epsilon(1e-13));
  }

  TEST_CASE("MVN KLD decomposes into Mahalanobis plus Burg") {
    CounterRng rng(41);
    Vector mu1, mu2;
    Matrix sg1, sg2;
    LocationScaleDensity p = seeded_mvn(2, rng, &mu1, &sg1);
    LocationScaleDensity q = seeded_mvn(2, rng, &mu2, &sg2);
    const double kl = kl_closed(p, q);
    const double split = mahalanobis(mu1, mu2, spd_inv(SpdMatrix(sg2))) +
                         burg(SpdMatrix(sg1), SpdMatrix(sg2));
    CHECK(kl == doctest::Approx(split).epsilon(1e-12));
    CHECK(kl >= 0.0);
  }

  TEST_CASE("Rayleigh KLD and the Itakura-Saito identity") {
    // sigma^2 parameters 2 and 1, i.e. group scales sqrt(2) and 1
    const double expected = 2.0 - std::log(2.0) - 1.0;
    LocationScaleDensity r1 = parse_density("rayleigh(s=1.4142135623730951)");
    LocationScaleDensity r2 = parse_density("rayleigh(s=1)");
    CHECK(kl_closed(r1, r2) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(rayleigh_kl(2.0, 1.0) == doctest::Approx(expected).epsilon(1e-14));
    CHECK(f_divergence_quadrature(r1, r2, make_generator("kl"), 1e-10).value ==
          doctest::Approx(expected).epsilon(1e-8));

    // KLD equals the Itakura-Saito divergence on swapped natural parameters
    const double v1 = 1.63, v2 = 0.52;  // sigma^2
    const double theta1 = -0.5 / v1, theta2 = -0.5 / v2;
    CHECK(rayleigh_kl(v1, v2) == doctest::Approx(itakura_saito(theta2, theta1)).epsilon(1e-13));
  }

  TEST_CASE("Weibull KLD closed form") {
    // equal shapes collapse to (s1/s2)^k - k log(s1/s2) - 1
    for (double k : {1.0, 2.0, 3.5}) {
      const double s1 = 1.4, s2 = 0.6;
      const double expected = std::pow(s1 / s2, k) - k * std::log(s1 / s2) - 1.0;
      CHECK(weibull_kl(k, s1, k, s2) == doctest::Approx(expected).epsilon(1e-10));
    }
    // scale invariance of the closed form
    for (double lambda : {0.5, 3.0}) {
      CHECK(weibull_kl(2.0, lambda * 1.3, 3.5, lambda * 0.7) ==
            doctest::Approx(weibull_kl(2.0, 1.3, 3.5, 0.7)).epsilon(1e-12));
    }
    // cross-family closures through the Weibull coordinates
    LocationScaleDensity expo = parse_density("exponential(s=1)");
    LocationScaleDensity ray = parse_density("rayleigh(s=1)");
    const double closed = kl_closed(expo, ray);
    const double quad = f_divergence_quadrature(expo, ray, make_generator("kl"), 1e-10).value;
    CHECK(closed == doctest::Approx(quad).epsilon(1e-8));
  }

  TEST_CASE("half-normal vs exponential closed form") {
    // the scale-ratio objective sqrt(2/pi) r - log r + log sqrt(2/pi) - 1/2
    // has value 1/2 + log(2/pi) at r = sqrt(pi/2) and 2/pi - 1/2 at
    // r = sqrt(2/pi)
    const double at_min = halfnormal_exponential_kl(1.0, std::sqrt(2.0 / M_PI));
    CHECK(at_min == doctest::Approx(0.5 + std::log(2.0 / M_PI)).epsilon(1e-13));
    const double off_min = halfnormal_exponential_kl(1.0, std::sqrt(M_PI / 2.0));
    CHECK(off_min == doctest::Approx(2.0 / M_PI - 0.5).epsilon(1e-13));

    for (double s1 : {0.6, 1.0, 1.9}) {
      for (double s2 : {0.5, 1.2}) {
        LocationScaleDensity hn = parse_density("halfnormal(s=" + std::to_string(s1) + ")");
        LocationScaleDensity ex = parse_density("exponential(s=" + std::to_string(s2) + ")");
        CHECK(kl_closed(hn, ex) ==
              doctest::Approx(f_divergence_quadrature(hn, ex, make_generator("kl"), 1e-10).value)
                  .epsilon(1e-9));
      }
    }
  }

  TEST_CASE("registry misses raise capability errors") {
    CHECK_FALSE(has_kl_closed(parse_density("laplace"), parse_density("normal")));
    CHECK_THROWS_AS(kl_closed(parse_density("laplace"), parse_density("normal")),
                    CapabilityError);
    CHECK_THROWS_AS(kl_closed(parse_density("student(nu=3)"), parse_density("student(nu=4)")),
                    CapabilityError);
    // orientation matters for the half-normal/exponential closure
    CHECK(has_kl_closed(parse_density("halfnormal"), parse_density("exponential")));
    CHECK_FALSE(has_kl_closed(parse_density("exponential"), parse_density("halfnormal")));
  }

  TEST_CASE("group invariance of quadrature divergences") {
    LocationScaleDensity p = parse_density("normal(l=0.4,s=1.2)");
    LocationScaleDensity q = parse_density("logistic(l=-0.3,s=0.8)");
    const GroupElement g(1.7, 0.6);
    for (const char* gen : {"kl", "hellinger2", "tv"}) {
      CAPTURE(gen);
      FGenerator f = make_generator(gen);
      const double before = f_divergence_quadrature(p, q, f, 1e-9).value;
      const double after = f_divergence_quadrature(acted(p, g), acted(q, g), f, 1e-9).value;
      CHECK(std::abs(before - after) < 1e-7);
    }
  }

  TEST_CASE("both canonical forms agree with the unreduced divergence") {
    // I_f(p_{g1} : q_{g2}) = I_f(p : q_{g1^{-1}g2}) = I_f(p_{g2^{-1}g1} : q)
    DensityPtr normal = parse_standard_density("normal");
    DensityPtr logistic = parse_standard_density("logistic");
    const GroupElement g1(0.8, 1.6), g2(-0.4, 0.7);
    for (const char* gen : {"kl", "hellinger2"}) {
      CAPTURE(gen);
      FGenerator f = make_generator(gen);
      const double direct = f_divergence_quadrature(LocationScaleDensity(normal, g1),
                                                    LocationScaleDensity(logistic, g2), f, 1e-10)
                                .value;
      const double right =
          f_divergence_quadrature(LocationScaleDensity(normal, GroupElement::identity(1)),
                                  LocationScaleDensity(logistic, canonical_reduce(g1, g2)), f,
                                  1e-10)
              .value;
      const double left =
          f_divergence_quadrature(LocationScaleDensity(normal, canonical_reduce(g2, g1)),
                                  LocationScaleDensity(logistic, GroupElement::identity(1)), f,
                                  1e-10)
              .value;
      CHECK(std::abs(direct - right) < 1e-8);
      CHECK(std::abs(direct - left) < 1e-8);
    }
  }

  TEST_CASE("canonical reduction agrees with a brute-force MC oracle (d=2)") {
    CounterRng rng(17);
    Vector mu1, mu2;
    Matrix sg1, sg2;
    LocationScaleDensity p = seeded_mvn(2, rng, &mu1, &sg1);
    LocationScaleDensity q = seeded_mvn(2, rng, &mu2, &sg2);
    const double reduced = kl_closed(
        LocationScaleDensity(p.base_ptr(), GroupElement::identity(2)),
        LocationScaleDensity(q.base_ptr(), canonical_reduce(p.g(), q.g())));
    oracles::McResult mc = oracles::mvn_kl_mc(mu1, sg1, mu2, sg2, 1000000, 424242);
    CHECK(std::abs(mc.value - reduced) < 3.0 * mc.stderr_);
  }

  TEST_CASE("scale invariance for scale families") {
    LocationScaleDensity hn = parse_density("halfnormal(s=0.9)");
    LocationScaleDensity ex = parse_density("exponential(s=1.4)");
    const double base = kl_closed(hn, ex);
    for (double lambda : {0.1, 1.0, 7.0}) {
      LocationScaleDensity hs = parse_density("halfnormal(s=" + std::to_string(0.9 * lambda) + ")");
      LocationScaleDensity es = parse_density("exponential(s=" + std::to_string(1.4 * lambda) + ")");
      CHECK(kl_closed(hs, es) == doctest::Approx(base).epsilon(1e-8));
    }
  }

  TEST_CASE("non-negativity and identity of indiscernibles") {
    CounterRng rng(53);
    for (int trial = 0; trial < 20; ++trial) {
      const double l1 = 2.0 * (rng.next_unit() - 0.5), l2 = 2.0 * (rng.next_unit() - 0.5);
      const double s1 = std::exp(rng.next_unit() - 0.5), s2 = std::exp(rng.next_unit() - 0.5);
      LocationScaleDensity p(parse_density("normal").base_ptr(), GroupElement(l1, s1));
      LocationScaleDensity q(parse_density("normal").base_ptr(), GroupElement(l2, s2));
      const double v = kl_closed(p, q);
      CHECK(v >= 0.0);
      if (l1 != l2 || s1 != s2) CHECK(v > 0.0);
    }
  }

  TEST_CASE("mahalanobis and burg basics") {
    Vector mu(2);
    mu << 1.0, -2.0;
    SpdMatrix q(Matrix::Identity(2, 2));
    CHECK(mahalanobis(mu, mu, q) == 0.0);

    SpdMatrix two(2.0 * Matrix::Identity(1, 1));
    SpdMatrix one(Matrix::Identity(1, 1));
    CHECK(burg(two, one) == doctest::Approx(0.5 * (2.0 - 1.0 - std::log(2.0))).epsilon(1e-13));
    CHECK(burg(one, one) == doctest::Approx(0.0));

    CounterRng rng(3);
    Matrix a(2, 2);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) a(i, j) = rng.next_normal();
    Matrix s1 = a * a.transpose() + Matrix::Identity(2, 2);
    Matrix s2 = 0.5 * s1 + 0.3 * Matrix::Identity(2, 2);
    for (double lambda : {0.5, 3.0}) {
      CHECK(burg(SpdMatrix(lambda * s1), SpdMatrix(lambda * s2)) ==
            doctest::Approx(burg(SpdMatrix(s1), SpdMatrix(s2))).epsilon(1e-12));
    }
  }

  TEST_CASE("entropies and the KLD decomposition") {
    const GroupElement id = GroupElement::identity(1);
    CHECK(entropy_shift(1.23, id) == doctest::Approx(1.23));

    LocationScaleDensity std_normal = parse_density("normal");
    const double h_std = differential_entropy(std_normal, 1e-12);
    CHECK(h_std == doctest::Approx(0.5 * std::log(2.0 * M_PI * std::exp(1.0))).epsilon(1e-10));
    const double h2 = entropy_shift(h_std, GroupElement(0.0, 2.0));
    CHECK(h2 == doctest::Approx(0.5 * std::log(2.0 * M_PI * std::exp(1.0)) + std::log(2.0))
                    .epsilon(1e-10));
    CHECK(differential_entropy(parse_density("normal(l=3,s=2)"), 1e-12) ==
          doctest::Approx(h2).epsilon(1e-10));

    LocationScaleDensity p = parse_density("normal(l=0.5,s=1.3)");
    LocationScaleDensity q = parse_density("normal(l=-0.2,s=0.7)");
    const double via_entropies =
        cross_entropy(p, q, 1e-12) - differential_entropy(p, 1e-12);
    CHECK(std::abs(via_entropies - kl_closed(p, q)) < 1e-10);

    // cross-entropy shift: h^x(g.p : g.q) = h^x(p:q) + log|P|
    const GroupElement g(1.1, 2.4);
    const double hx = cross_entropy(p, q, 1e-12);
    CHECK(cross_entropy(acted(p, g), acted(q, g), 1e-12) ==
          doctest::Approx(cross_entropy_shift(hx, g)).epsilon(1e-9));
    CHECK(cross_entropy_shift(hx, g) == doctest::Approx(hx + std::log(2.4)).epsilon(1e-12));
  }

  TEST_CASE("gaussian mutual information") {
    CHECK(gaussian_mutual_information(0.0) == 0.0);
    CHECK(gaussian_mutual_information(0.5) ==
          doctest::Approx(-0.5 * std::log(0.75)).epsilon(1e-14));
    CHECK_THROWS_AS(gaussian_mutual_information(1.0), std::domain_error);
    CHECK_THROWS_AS(gaussian_mutual_information(-1.2), std::domain_error);

    MiInvarianceReport rep =
        mi_invariance_check(0.5, AffineMap{2.0, 1.0}, AffineMap{-1.0, 0.0}, 200000, 8);
    CHECK(rep.consistent(4.0));
    CHECK(std::abs(rep.base.value - rep.analytic) <= 4.0 * rep.base.stderr_);
    CHECK_THROWS_AS(mi_invariance_check(0.5, AffineMap{0.0, 0.0}, AffineMap{1.0, 0.0}, 10, 1),
                    std::domain_error);
  }

  TEST_CASE("log-normal KLD via the normal formula") {
    CHECK(lognormal_kl(0.3, 1.1, 0.3, 1.1) == 0.0);
    CHECK(lognormal_kl(0.0, 1.0, 1.0, 1.0) == doctest::Approx(0.5).epsilon(1e-14));

    LocationScaleDensity ln1 = pushforward_exp(parse_density("normal(l=0.2,s=1.3)"));
    LocationScaleDensity ln2 = pushforward_exp(parse_density("normal(l=-0.5,s=0.9)"));
    const double quad = f_divergence_quadrature(ln1, ln2, make_generator("kl"), 1e-9).value;
    CHECK(std::abs(quad - lognormal_kl(0.2, 1.3, -0.5, 0.9)) < 1e-7);
    CHECK(kl_closed(ln1, ln2) == doctest::Approx(lognormal_kl(0.2, 1.3, -0.5, 0.9)).epsilon(1e-13));
  }

  TEST_CASE("infinite divergences are reported, not mis-converged") {
    DivergenceValue v = f_divergence(parse_density("cauchy"), parse_density("normal"),
                                     make_generator("kl"));
    CHECK(v.diverged);
    CHECK(std::isinf(v.value));
    CHECK(v.method == Method::quadrature);

    // superlinear generator across unequal supports
    DivergenceValue w = f_divergence_quadrature(parse_density("halfnormal"),
                                                parse_density("normal"),
                                                make_generator("reverse_kl"), 1e-8);
    CHECK(w.diverged);
  }

  TEST_CASE("method selection and overrides") {
    DivergenceOptions closed_only;
    closed_only.method = Method::closed_form;
    CHECK_THROWS_AS(f_divergence(parse_density("laplace"), parse_density("normal"),
                                 make_generator("kl"), closed_only),
                    CapabilityError);
    CHECK_THROWS_AS(f_divergence(parse_density("normal"), parse_density("normal(l=1)"),
                                 make_generator("hellinger2"), closed_only),
                    CapabilityError);

    DivergenceValue auto_normal = f_divergence(parse_density("normal"),
                                               parse_density("normal(l=1)"), make_generator("kl"));
    CHECK(auto_normal.method == Method::closed_form);
    CHECK(auto_normal.value == doctest::Approx(0.5));

    // reverse_kl rides the closed form with swapped arguments
    DivergenceValue rkl = f_divergence(parse_density("normal"), parse_density("normal(l=1)"),
                                       make_generator("reverse_kl"));
    CHECK(rkl.method == Method::closed_form);
    CHECK(rkl.value == doctest::Approx(0.5));

    DivergenceOptions mc;
    mc.method = Method::monte_carlo;
    CHECK_THROWS_AS(f_divergence(parse_density("normal"), parse_density("normal(l=1)"),
                                 make_generator("kl"), mc),
                    std::invalid_argument);  // no seed
    mc.seed = 99;
    mc.mc_samples = 20000;
    DivergenceValue est = f_divergence(parse_density("normal"), parse_density("normal(l=1)"),
                                       make_generator("kl"), mc);
    CHECK(est.method == Method::monte_carlo);
    CHECK(est.stderr_.has_value());
    CHECK(std::abs(est.value - 0.5) <= 4.0 * *est.stderr_);

    // d > 1 auto-selects Monte Carlo
    CounterRng rng(13);
    LocationScaleDensity p = seeded_mvn(2, rng, nullptr, nullptr);
    LocationScaleDensity q = seeded_mvn(2, rng, nullptr, nullptr);
    DivergenceOptions opt;
    opt.seed = 7;
    opt.mc_samples = 50000;
    DivergenceValue hd = f_divergence(p, q, make_generator("hellinger2"), opt);
    CHECK(hd.method == Method::monte_carlo);
    CHECK(hd.value >= 0.0);
    CHECK(hd.value < 1.0);  // squared Hellinger is bounded by 1

    // non-regular families are refused
    CHECK_THROWS_AS(f_divergence(parse_density("uniform01"), parse_density("normal"),
                                 make_generator("kl")),
                    std::domain_error);
  }
}
