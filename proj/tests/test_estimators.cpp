#include "lsdiv/estimators.hpp"

#include <cmath>
#include <numeric>

#include "doctest.h"
#include "lsdiv/divergence.hpp"

using namespace lsdiv;

TEST_SUITE("estimators") {
  TEST_CASE("pairwise summation") {
    std::vector<double> v(1000);
    for (size_t i = 0; i < v.size(); ++i) v[i] = std::sin(0.1 * i);
    const double plain = std::accumulate(v.begin(), v.end(), 0.0);
    CHECK(std::abs(pairwise_sum(v) - plain) < 1e-10);
    CHECK(pairwise_sum(v, 4) == pairwise_sum(v, 4));  // fixed partition count is deterministic
    CHECK(std::abs(pairwise_sum(v, 4) - plain) < 1e-10);
  }

  TEST_CASE("sample sets are reproducible and transform correctly") {
    DensityPtr normal = parse_standard_density("normal");
    SampleSet a = SampleSet::from_standard(normal, 256, 42);
    SampleSet b = SampleSet::from_standard(normal, 256, 42);
    CHECK((a.draws - b.draws).cwiseAbs().maxCoeff() == 0.0);
    SampleSet c = SampleSet::from_standard(normal, 256, 43);
    CHECK((a.draws - c.draws).cwiseAbs().maxCoeff() > 0.0);

    SampleSet empty = SampleSet::from_standard(normal, 0, 1);
    CHECK(empty.draws.cols() == 0);

    LocationScaleDensity member(normal, GroupElement(2.0, 3.0));
    SampleSet moved = SampleSet::from(member, 64, 42);
    for (int j = 0; j < 64; ++j) {
      CHECK(moved.draws(0, j) == doctest::Approx(3.0 * a.draws(0, j) + 2.0).epsilon(1e-15));
    }
  }

  TEST_CASE("identical arguments estimate zero exactly") {
    LocationScaleDensity p = parse_density("normal(l=0.3,s=1.7)");
    SampleSet s = SampleSet::from(p, 100, 7);
    FGenerator kl = make_generator("kl");
    CHECK(estimate_importance(p, p, kl, p, s).value == 0.0);
    CHECK(estimate_plugin(p, p, kl, s).value == 0.0);
    CHECK(estimate_bregman(p, p, kl, s).value == 0.0);
  }

  TEST_CASE("KL estimates recover the closed form within 4 stderr") {
    LocationScaleDensity p = parse_density("normal(l=0,s=1)");
    LocationScaleDensity q = parse_density("normal(l=1,s=1)");
    FGenerator kl = make_generator("kl");

    SampleSet from_p = SampleSet::from(p, 100000, 11);
    Estimate plug = estimate_plugin(p, q, kl, from_p);
    CHECK(std::abs(plug.value - 0.5) <= 4.0 * plug.stderr_);

    Estimate breg = estimate_bregman(p, q, kl, from_p);
    CHECK(breg.value >= 0.0);
    CHECK(std::abs(breg.value - 0.5) <= 4.0 * breg.stderr_);

    // a wider proposal changes nothing but the variance
    LocationScaleDensity r = parse_density("normal(l=0,s=2)");
    SampleSet from_r = SampleSet::from(r, 100000, 12);
    Estimate imp = estimate_importance(p, q, kl, r, from_r);
    CHECK(std::abs(imp.value - 0.5) <= 4.0 * imp.stderr_);
  }

  TEST_CASE("importance sampling with r = p reduces to the plug-in form") {
    LocationScaleDensity p = parse_density("normal(l=0,s=1)");
    LocationScaleDensity q = parse_density("normal(l=0.8,s=1.4)");
    FGenerator kl = make_generator("kl");
    SampleSet s = SampleSet::from(p, 4096, 17);
    Estimate imp = estimate_importance(p, q, kl, p, s);
    Estimate plug = estimate_plugin(p, q, kl, s);
    CHECK(imp.value == doctest::Approx(plug.value).epsilon(1e-12));
  }

  TEST_CASE("Bregman estimates stay non-negative in adversarial settings") {
    LocationScaleDensity p = parse_density("normal(l=0,s=1)");
    LocationScaleDensity q = parse_density("normal(l=50,s=0.01)");
    SampleSet tiny = SampleSet::from(p, 3, 5);
    Estimate e = estimate_bregman(p, q, make_generator("kl"), tiny);
    CHECK(e.value >= 0.0);
    CHECK(e.m == 3);
  }

  TEST_CASE("generators without a derivative are rejected") {
    LocationScaleDensity p = parse_density("normal");
    SampleSet s = SampleSet::from(p, 16, 3);
    CHECK_THROWS_AS(estimate_bregman(p, p, make_generator("tv"), s), CapabilityError);
  }

  TEST_CASE("unbiasedness over 200 replications") {
    LocationScaleDensity p = parse_density("normal(l=0,s=1)");
    LocationScaleDensity q = parse_density("normal(l=1,s=1)");
    FGenerator kl = make_generator("kl");
    std::vector<double> means;
    for (int rep = 0; rep < 200; ++rep) {
      SampleSet s = SampleSet::from(p, 1000, 1000 + rep);
      means.push_back(estimate_bregman(p, q, kl, s).value);
    }
    double mean = std::accumulate(means.begin(), means.end(), 0.0) / means.size();
    double var = 0.0;
    for (double m : means) var += (m - mean) * (m - mean);
    var /= (means.size() - 1);
    const double stderr_of_means = std::sqrt(var / means.size());
    CHECK(std::abs(mean - 0.5) <= 4.0 * stderr_of_means);
  }

  TEST_CASE("proper-divergence behaviour at m = 64") {
    DensityPtr normal = parse_standard_density("normal");
    FGenerator kl = make_generator("kl");
    SampleSet s = SampleSet::from_standard(normal, 64, 21);
    const GroupElement g(0.4, 1.3), g_other(0.9, 0.8);
    CHECK(estimate_reduced(g, g, normal, normal, kl, s).value == 0.0);
    CHECK(estimate_reduced(g, g_other, normal, normal, kl, s).value > 0.0);
  }

  TEST_CASE("reduced estimator matches the unreduced importance route") {
    DensityPtr normal = parse_standard_density("normal");
    FGenerator kl = make_generator("kl");
    const GroupElement g1(0.7, 1.4), g2(-0.2, 0.9);
    SampleSet s_std = SampleSet::from_standard(normal, 200000, 31);
    Estimate reduced = estimate_reduced(g1, g2, normal, normal, kl, s_std);

    LocationScaleDensity p(normal, g1), q(normal, g2);
    SampleSet s_p = SampleSet::from(p, 200000, 32);
    Estimate direct = estimate_plugin(p, q, kl, s_p);
    const double band = 4.0 * std::sqrt(reduced.stderr_ * reduced.stderr_ +
                                        direct.stderr_ * direct.stderr_);
    CHECK(std::abs(reduced.value - direct.value) <= band);
    CHECK(reduced.value == doctest::Approx(kl_closed(p, q)).epsilon(0.05));
  }

  TEST_CASE("reduced estimator is exactly invariant under a common dyadic action") {
    DensityPtr normal = parse_standard_density("normal");
    FGenerator kl = make_generator("kl");
    SampleSet s = SampleSet::from_standard(normal, 512, 77);
    const GroupElement g1(1.0, 4.0), g2(-3.0, 0.25), g(0.5, 2.0);
    Estimate base = estimate_reduced(g1, g2, normal, normal, kl, s);
    Estimate moved = estimate_reduced(compose(g, g1), compose(g, g2), normal, normal, kl, s);
    CHECK(base.value == moved.value);  // bitwise: the canonical element is identical
  }

  TEST_CASE("comparison consistency on a fixed sample set") {
    DensityPtr normal = parse_standard_density("normal");
    FGenerator kl = make_generator("kl");
    SampleSet s = SampleSet::from_standard(normal, 2048, 55);
    std::vector<GroupElement> targets;
    for (int i = 0; i < 5; ++i) targets.push_back(GroupElement(0.3 * i, 1.0 + 0.2 * i));
    std::vector<double> first;
    for (int pass = 0; pass < 3; ++pass) {
      std::vector<double> values;
      for (const GroupElement& t : targets) {
        values.push_back(
            estimate_reduced(GroupElement(0.0, 1.0), t, normal, normal, kl, s).value);
      }
      if (pass == 0) {
        first = values;
      } else {
        CHECK(values == first);
      }
    }
  }

  TEST_CASE("vanishing proposal density is reported with the sample index") {
    LocationScaleDensity p = parse_density("normal");
    LocationScaleDensity uniform = parse_density("uniform01");
    SampleSet s = SampleSet::from(p, 64, 9);  // normal draws leave [0,1]
    CHECK_THROWS_WITH_AS(
        estimate_importance(p, p, make_generator("kl"), uniform, s),
        doctest::Contains("sample index"), std::runtime_error);
  }

  TEST_CASE("half-line bases reject shifted reductions") {
    DensityPtr expo = parse_standard_density("exponential");
    FGenerator kl = make_generator("kl");
    SampleSet s = SampleSet::from_standard(expo, 32, 2);
    CHECK_THROWS_AS(estimate_reduced(GroupElement(0.5, 1.0), GroupElement(0.0, 2.0), expo, expo,
                                     kl, s),
                    std::domain_error);
    CHECK_NOTHROW(estimate_reduced(GroupElement(0.0, 1.5), GroupElement(0.0, 2.0), expo, expo,
                                   kl, s));
  }
}
