#include "tve/constitutive.hpp"

#include <doctest.h>

#include <cmath>

using namespace tve;

namespace {
const DevTensor3 kT = DevTensor3::project(SymTensor3(2.0, -1.0, 0.5, 0.7, -0.3, 0.1));
}

TEST_SUITE("constitutive") {

TEST_CASE("norton-hoff matches the power law") {
  const double c = 1.5, p = 3.5;
  const ConstitutiveLaw law(NortonHoff{c, p});
  const double n = kT.norm();
  const Mandel want = c * std::pow(n, p - 2.0) * kT.mandel();
  CHECK((law.evaluate(0.3, kT).mandel() - want).norm() < 1e-13);
  CHECK(law.dissipation_density(0.3, kT) == doctest::Approx(c * std::pow(n, p)));
  CHECK(law.evaluate(1.0, DevTensor3{}).norm() == 0.0);
  CHECK(law.growth_constant() == c);
  CHECK(law.coercivity_constant() == c);
  CHECK(law.exponent() == p);
  CHECK_FALSE(law.is_temperature_dependent());
}

TEST_CASE("mroz profiles") {
  const auto g = MrozProfile::rational(1.0, 0.5);
  CHECK(g(0.0) == doctest::Approx(1.5));
  CHECK(g(1.0) == doctest::Approx(1.0));
  // Below theta_min = 0 the profile is held at g(0).
  CHECK(g(-1.0) == doctest::Approx(1.5));
  CHECK(g.range().first == doctest::Approx(0.5));
  CHECK(g.range().second == doctest::Approx(1.5));

  auto t = MrozProfile::tabulated({{2.0, 3.0}, {0.0, 1.0}});
  CHECK(t(1.0) == doctest::Approx(2.0));
  CHECK(t(-5.0) == doctest::Approx(1.0));
  CHECK(t(9.0) == doctest::Approx(3.0));
  CHECK_THROWS_AS(MrozProfile::tabulated({}), BadConfig);
  CHECK_THROWS_AS(MrozProfile::tabulated({{1.0, 1.0}, {1.0, 2.0}}), BadConfig);

  auto cut = MrozProfile::rational(1.0, 0.5);
  cut.theta_min = 1.0;
  CHECK(cut(0.0) == doctest::Approx(1.0));
  CHECK(cut.range().second == doctest::Approx(1.0));

  const ConstitutiveLaw law(Mroz{g});
  CHECK((law.evaluate(1.0, kT).mandel() - kT.mandel()).norm() < 1e-14);
  CHECK(law.coercivity_constant() == doctest::Approx(0.5));
  CHECK(law.is_temperature_dependent());
}

TEST_CASE("bodner-partom rate is deviatoric, codirectional and dissipative") {
  BodnerPartom bp;
  bp.a = 2.0;
  bp.p = 3.0;
  const ConstitutiveLaw law(bp);
  const DevTensor3 g = law.evaluate(1.0, kT, 1.5);
  CHECK(std::abs(g.trace()) < 1e-14);
  // G = 𝒢(|T|/y) T/|T|.
  const double n = kT.norm();
  CHECK((g.mandel() - bp.rate_function(n / 1.5) / n * kT.mandel()).norm() < 1e-13);
  CHECK(law.dissipation_density(1.0, kT, 1.5) > 0.0);
  CHECK(law.has_hardening());

  bp.threshold = 1.0;
  CHECK_THROWS_AS((ConstitutiveLaw{bp}), BadConfig);
}

TEST_CASE("laws reject bad parameters and non-finite input") {
  CHECK_THROWS_AS((ConstitutiveLaw{NortonHoff{0.0, 2.0}}), BadConfig);
  CHECK_THROWS_AS((ConstitutiveLaw{NortonHoff{1.0, 1.5}}), BadConfig);
  const ConstitutiveLaw law(NortonHoff{});
  CHECK_THROWS_AS(law.evaluate(NAN, kT), NonFiniteInput);
}

TEST_CASE("certification of valid laws passes and is reproducible") {
  CertificationOptions o;
  o.sample_count = 2000;
  for (double p : {2.0, 3.0, 4.0}) {
    const ConstitutiveLaw law(NortonHoff{1.0, p});
    const auto r = certify_assumption1(law, o);
    CHECK(r.passed);
    CHECK(r.samples == 2000);
    CHECK(r.min_monotonicity >= -1e-12);
    CHECK(r.max_trace < 1e-12);
    const auto again = run_certification(law, o);
    CHECK(again.min_monotonicity == r.min_monotonicity);
  }
  o.sample_count = 0;
  CHECK_THROWS_AS(run_certification(ConstitutiveLaw(NortonHoff{}), o), PreconditionError);
}

TEST_CASE("hardening update and domain policy") {
  BodnerPartom bp;
  bp.gamma0 = 1.0;
  bp.delta0 = 1.0;
  bp.A = 0.5;
  bp.y0 = 1.0;
  // Zero stress: y_t = −A δ0 y.
  auto s = advance_hardening(bp, {1.0}, 1.0, DevTensor3{}, 0.1);
  CHECK(s.y == doctest::Approx(1.0 - 0.1 * 0.5));
  const DevTensor3 big = DevTensor3::project(SymTensor3(100.0, -100.0, 0.0, 0.0, 0.0, 0.0));
  CHECK(advance_hardening(bp, {1.0}, 1.0, big, 1.0).y == doctest::Approx(bp.y_max));
  CHECK_THROWS_AS(advance_hardening(bp, {1.0}, 1.0, big, 1.0, ClampPolicy::Reject), DomainExit);
  CHECK_THROWS_AS(advance_hardening(bp, {1.0}, 1.0, kT, 0.0), PreconditionError);
}

}
