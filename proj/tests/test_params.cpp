#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "doctest.h"

#include "cgl/discretization.hpp"
#include "cgl/errors.hpp"
#include "cgl/params.hpp"

using namespace cgl;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

ParamSet raw(double a, double alpha, double b, double beta, double c, double gamma, double k = 0.0,
             double s1 = 1.0, double s2 = 2.0) {
  return ParamSet{a, alpha, b, beta, c, gamma, k, s1, s2};
}

bool cond(const BranchReport& r, const char* name) {
  const Condition* c = r.find(name);
  REQUIRE(c != nullptr);
  return c->satisfied;
}

}  // namespace

TEST_CASE("ParamSet validation") {
  CHECK_NOTHROW(raw(1, 0, 1, 0, 1, 0).validate());
  CHECK_THROWS_AS(raw(0, 0, 1, 0, 1, 0).validate(), InputError);
  CHECK_THROWS_AS(raw(1, 0, 1, 0, 1, 0, 0, -1.0).validate(), InputError);
  CHECK_THROWS_AS(raw(1, 0, 1, 0, 1, 0, 0, 1.0, 0.0).validate(), InputError);
  CHECK_THROWS_AS(raw(1, NAN, 1, 0, 1, 0).validate(), InputError);
}

TEST_CASE("trig form of all-real coefficients") {
  const TrigForm f = to_trig_form(raw(1, 0, 1, 0, 1, 0));
  CHECK(f.trig.theta == 0.0);
  CHECK(f.trig.gamma1 == 0.0);
  // chi e^{i gamma2} = -1
  CHECK(f.trig.chi == -1);
  CHECK(f.trig.gamma2 == Approx(0.0));
  CHECK(f.moduli[0] == 1.0);
  CHECK(f.moduli[1] == 1.0);
  CHECK(f.moduli[2] == 1.0);
  CHECK(f.exact_equivalence);
}

TEST_CASE("trig form angles") {
  const TrigForm f = to_trig_form(raw(1, 1, 1, 0, 1, 0));
  CHECK(f.trig.theta == Approx(kPi / 4));
  CHECK(f.moduli[0] == Approx(std::sqrt(2.0)));
  CHECK_FALSE(f.exact_equivalence);
  CHECK(to_trig_form(raw(1, 0, 0, 1, 1, 0)).trig.gamma1 == Approx(kPi / 2));
}

TEST_CASE("trig form rejects vanishing nonlinear pairs") {
  CHECK_THROWS_AS(to_trig_form(raw(1, 0, 0, 0, 1, 0)), HypothesisError);
  CHECK_THROWS_AS(to_trig_form(raw(1, 0, 1, 0, 0, 0)), HypothesisError);
}

TEST_CASE("property: trig form round trip") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 500; ++i) {
    const ParamSet p = raw(std::abs(u(rng)) + 0.01, u(rng), u(rng), u(rng), u(rng), u(rng), u(rng));
    const TrigForm f = to_trig_form(p);
    CHECK(std::abs(f.trig.theta) < kPi / 2);
    CHECK(f.trig.gamma1 > -kPi);
    CHECK(f.trig.gamma1 <= kPi);
    CHECK(f.trig.gamma2 > -kPi);
    CHECK(f.trig.gamma2 <= kPi);
    CHECK(f.trig.chi * f.trig.chi == 1);
    const ParamSet q = from_trig_form(f.trig, f.moduli);
    using C = std::complex<double>;
    auto rel = [](C x, C y) { return std::abs(x - y) / std::abs(y); };
    CHECK(rel(C(q.a, q.alpha), C(p.a, p.alpha)) < 1e-14);
    CHECK(rel(C(q.b, q.beta), C(p.b, p.beta)) < 1e-14);
    CHECK(rel(C(q.c, q.gamma), C(p.c, p.gamma)) < 1e-14);
  }
}

TEST_CASE("wrap_angle lands in (-pi, pi]") {
  CHECK(wrap_angle(-kPi) == Approx(kPi));
  CHECK(wrap_angle(3 * kPi / 2) == Approx(-kPi / 2));
  CHECK(wrap_angle(0.3) == 0.3);
}

TEST_CASE("global existence") {
  CHECK(classify(raw(1, 1, 1, 0, 1, 0, 0, 1, 2)).global_existence.satisfied);
  const RegimeReport r = classify(raw(1, 0, 1, 0, 1, 0, 0, 1, 2));
  CHECK_FALSE(r.global_existence.satisfied);
  CHECK_FALSE(cond(r.global_existence, "alpha != 0"));
  // gamma/alpha = 0 is on the boundary of the non-strict condition
  const Condition* g = r.global_existence.find("gamma/alpha >= 0");
  if (g) CHECK(g->relation == Relation::GreaterEqual);
  CHECK_FALSE(classify(raw(1, 1, 1, -1, 1, -1, 0, 1, 2)).global_existence.satisfied);
  CHECK_FALSE(classify(raw(1, 1, 1, 0, 1, 0, 0, 2, 1)).global_existence.satisfied);
}

TEST_CASE("H1 stability of the decaying parameter set") {
  const ParamSet p = raw(1, 0.5, 0.1, 0.05, 1, 0.5, -1, 1, 2);
  const RegimeReport r = classify(p);
  CHECK(r.h1_stable());
  const BranchReport& b = r.h1_k_negative;
  const Condition* c1 = b.find("b (sigma1+1) < min(c, |k|)");
  REQUIRE(c1);
  CHECK(c1->lhs == Approx(0.2));
  CHECK(c1->rhs == Approx(1.0));
  const Condition* c2 = b.find("b (sigma2-sigma1)/sigma2 <= |k|/2");
  REQUIRE(c2);
  CHECK(c2->lhs == Approx(0.05));
  CHECK(c2->rhs == Approx(0.5));
  const Condition* c3 = b.find("b sigma1/((sigma1+2) sigma2) <= c/(sigma2+2)");
  REQUIRE(c3);
  CHECK(c3->lhs == Approx(0.1 / 6.0));
  CHECK(c3->rhs == Approx(0.25));
  // breaking proportionality breaks the branch
  ParamSet q = p;
  q.gamma = 0.6;
  CHECK_FALSE(classify(q).h1_stable());
}

TEST_CASE("Lp stability conditions") {
  ParamSet p = raw(1, 0.5, 0.5, 0, 1, 0, -1, 1, 2);
  ClassifyOptions o;
  o.lp_exponent = 4.0;
  RegimeReport r = classify(p, o);
  CHECK(r.lp_stable.satisfied);
  CHECK(r.lp_asymptotically_stable.satisfied);
  // b (s2-s1)/s2 = |k| is allowed non-strictly only
  p.b = 2.0;
  p.c = 2.0;
  r = classify(p, o);
  const Condition* c = r.lp_stable.find("b (sigma2-sigma1)/sigma2 <= |k|");
  REQUIRE(c);
  CHECK(c->satisfied);
  CHECK(c->on_boundary);
  CHECK(r.lp_stable.satisfied);
  CHECK_FALSE(r.lp_asymptotically_stable.satisfied);
  // |alpha|(p-2)/2 <= a
  p = raw(1, 1.5, 0.1, 0, 1, 0, -1, 1, 2);
  CHECK_FALSE(classify(p, o).lp_stable.satisfied);
  p.k = 0.5;
  CHECK_FALSE(classify(raw(1, 0, 0.1, 0, 1, 0, 0.5, 1, 2), o).lp_stable.satisfied);
}

TEST_CASE("bounded-domain branch needs a volume") {
  ClassifyOptions o;
  o.bounded_domain = true;
  CHECK_THROWS_AS(classify(raw(1, 0, 1, 0, 1, 0), o), InputError);
  o.domain_volume = -1.0;
  CHECK_THROWS_AS(classify(raw(1, 0, 1, 0, 1, 0), o), InputError);
}

TEST_CASE("unit ball volumes and the Poincare factor") {
  CHECK(unit_ball_volume(1) == Approx(2.0));
  CHECK(unit_ball_volume(2) == Approx(kPi));
  CHECK(unit_ball_volume(3) == Approx(4 * kPi / 3));
  CHECK(poincare_factor(2.0, 1) == Approx(1.0));
  CHECK(poincare_factor(0.5, 1) == Approx(16.0));
  CHECK(poincare_factor(kPi, 2) == Approx(1.0));
}

TEST_CASE("p = 2 bounded-domain branch") {
  // b+ (s2-s1)/s2 + k < a (|Omega|/omega_1)^{-2}; |Omega| = 1 gives a factor 4
  ClassifyOptions o;
  o.domain_volume = 1.0;
  RegimeReport r = classify(raw(1, 0, 1, 0, 1, 0, 3.0, 1, 2), o);
  CHECK(r.l2_bounded_domain.satisfied);
  r = classify(raw(1, 0, 1, 0, 1, 0, 3.5, 1, 2), o);
  CHECK_FALSE(r.l2_bounded_domain.satisfied);
}

TEST_CASE("proportionality drops vanishing ratios") {
  CHECK(proportionality(raw(2, 1, 0, 7, 4, 2)).satisfied);
  CHECK(proportionality(raw(2, 1, 2, 1, 0, 5)).satisfied);
  CHECK_FALSE(proportionality(raw(2, 1, 2, 1.1, 4, 2)).satisfied);
  CHECK(proportionality(raw(2, 1, 2, 1 + 1e-14, 4, 2)).satisfied);
}

TEST_CASE("property: ratio conditions are scale invariant") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-2.0, 2.0), s(0.1, 10.0);
  const char* names[] = {"b sigma1/sigma2 <= c"};
  for (int i = 0; i < 300; ++i) {
    ParamSet p = raw(1.0, u(rng), u(rng), u(rng), std::abs(u(rng)), u(rng), -std::abs(u(rng)) - 0.1, 1.0, 2.5);
    ParamSet q = p;
    const double f = s(rng);
    q.b *= f;
    q.beta *= f;
    q.c *= f;
    q.gamma *= f;
    const RegimeReport rp = classify(p), rq = classify(q);
    for (const char* n : names) CHECK(cond(rp.lp_stable, n) == cond(rq.lp_stable, n));
    CHECK(cond(rp.h1_k_negative, "b sigma1/((sigma1+2) sigma2) <= c/(sigma2+2)") ==
          cond(rq.h1_k_negative, "b sigma1/((sigma1+2) sigma2) <= c/(sigma2+2)"));
    CHECK(proportionality(p).satisfied == proportionality(q).satisfied);
  }
}

TEST_CASE("property: every branch names its deciding inequalities") {
  const RegimeReport r = classify(raw(1, 0.5, 0.1, 0.05, 1, 0.5, -1, 1, 2));
  for (const BranchReport* b : {&r.global_existence, &r.lp_stable, &r.lp_asymptotically_stable, &r.h1_k_negative,
                                &r.blow_up_admissible, &r.periodic_orbit}) {
    if (!b->evaluated) continue;
    CHECK_FALSE(b->conditions.empty());
    bool all = true;
    for (const auto& c : b->conditions) {
      CHECK_FALSE(c.name.empty());
      all = all && c.satisfied;
    }
    CHECK(all == b->satisfied);
  }
}

TEST_CASE("periodic orbit parameters") {
  auto o = periodic_orbit_params(raw(1, 0, -1, 1, 0, 0, 1, 2, 4));
  REQUIRE(o);
  CHECK(o->which == PeriodicCase::Case1_c0);
  CHECK(o->r0 == Approx(1.0));
  CHECK(o->freq == Approx(1.0));
  CHECK(o->period == Approx(2 * kPi));

  o = periodic_orbit_params(raw(1, 0, 1, 2, 1, 1, 0, 1, 3));
  REQUIRE(o);
  CHECK(o->which == PeriodicCase::Case2_k0);
  CHECK(o->r0 == Approx(1.0));
  CHECK(o->freq == Approx(1.0));
  CHECK(o->period == Approx(2 * kPi));

  o = periodic_orbit_params(raw(1, 0, 2, 0, 1, 0, 0, 1, 2));
  REQUIRE(o);
  CHECK(o->r0 == Approx(2.0));
  CHECK(o->degenerate);
  CHECK(std::isinf(o->period));

  CHECK_FALSE(periodic_orbit_params(raw(1, 0, 1, 0, 1, 0, 1, 1, 2)));
  CHECK_FALSE(periodic_orbit_params(raw(1, 0, 1, 0, 0, 0, 1, 1, 2)));
}

TEST_CASE("property: periodic orbit radius solves its defining equation") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.1, 3.0), s(0.2, 4.0);
  for (int i = 0; i < 400; ++i) {
    const double sign = (i % 2) ? 1.0 : -1.0;
    ParamSet p = raw(1.0, 0.0, sign * u(rng), u(rng), 0.0, u(rng), -sign * u(rng), s(rng), s(rng) + 4.1);
    if (i % 4 >= 2) {
      p.k = 0.0;
      p.c = p.b * u(rng);
    }
    const auto o = periodic_orbit_params(p);
    REQUIRE(o);
    const double res = p.b * std::pow(o->r0, p.sigma1) - p.c * std::pow(o->r0, p.sigma2) + p.k;
    CHECK(std::abs(res) < 1e-12 * std::max({1.0, std::abs(p.k), std::abs(p.b) * std::pow(o->r0, p.sigma1)}));
    if (!o->degenerate) CHECK(o->period * std::abs(o->freq) == Approx(2 * kPi));
  }
}

TEST_CASE("blow-up energy") {
  const Grid g = Grid::interval(0.0, 1.0, 1025);
  CHECK(blowup_energy(Field(g, Boundary::Dirichlet), 0.0, 0.0, 2.0, 4.0).energy == 0.0);
  const auto sine = [&](double amp) {
    return Field::sample(g, Boundary::Dirichlet, [=](double x, double) { return amp * std::sin(kPi * x); });
  };
  const BlowupEnergy e = blowup_energy(sine(6.0), 0.0, 0.0, 2.0, 4.0);
  CHECK(e.energy == Approx(9 * kPi * kPi - 121.5).epsilon(1e-5));
  CHECK(e.hypotheses_hold);
  CHECK(blowup_energy(sine(1e-3), 0.0, 0.0, 2.0, 4.0).energy > 0.0);
  CHECK_FALSE(blowup_energy(sine(1.0), 0.0, 1.0, 2.0, 4.0).hypotheses_hold);
  CHECK(blowup_energy(sine(1.0), 0.0, 1.0, 4.0, 2.0).hypotheses_hold);
  CHECK_FALSE(blowup_energy(sine(1.0), 0.0, 0.0, 2.0, 4.0, -1.0).hypotheses_hold);
  CHECK_THROWS_AS(blowup_energy(Field(g, Boundary::Neumann), 0.0, 0.0, 2.0, 4.0), InputError);
  CHECK_THROWS_AS(blowup_energy(sine(1.0), 2.0, 0.0, 2.0, 4.0), InputError);
}
