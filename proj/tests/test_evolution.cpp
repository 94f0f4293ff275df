#include <cmath>
#include <numbers>

#include <boost/numeric/odeint.hpp>

#include "doctest.h"

#include "cgl/discretization.hpp"
#include "cgl/errors.hpp"
#include "cgl/evolution.hpp"
#include "cgl/params.hpp"
#include "cgl/scenario.hpp"

using namespace cgl;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

ParamSet linear_params(double a, double alpha, double k) {
  ParamSet p;
  p.a = a;
  p.alpha = alpha;
  p.k = k;
  p.sigma1 = 2.0;
  p.sigma2 = 4.0;
  return p;
}

ParamSet nonlinear_params() {
  ParamSet p;
  p.a = 1.0;
  p.alpha = 0.4;
  p.b = 1.0;
  p.beta = -0.3;
  p.c = 0.6;
  p.gamma = 0.2;
  p.k = 0.3;
  p.sigma1 = 2.0;
  p.sigma2 = 3.0;
  return p;
}

double max_diff(const Field& u, const Field& v) {
  double m = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) m = std::max(m, std::abs(u[i] - v[i]));
  return m;
}

double mass_residual_max(int n, double dt) {
  const ParamSet p = nonlinear_params();
  const Grid g = Grid::interval(0.0, 1.0, n);
  const Field u0 = Field::sample(g, Boundary::Dirichlet, [](double x, double) {
    return cplx(std::sin(kPi * x), 0.5 * std::sin(2 * kPi * x));
  });
  SolverConfig cfg;
  cfg.dt = dt;
  cfg.t_end = 0.04;
  const RunResult r = run(u0, p, cfg);
  double m = 0.0;
  for (const auto& s : r.log.samples) m = std::max(m, s.mass_residual);
  return m;
}

}  // namespace

TEST_CASE("zero data is a fixed point") {
  const Grid g = Grid::interval(0.0, 1.0, 33);
  const Field z(g, Boundary::Dirichlet);
  SolverConfig cfg;
  cfg.dt = 1e-3;
  CHECK(sup_norm(step(z, nonlinear_params(), cfg)) == 0.0);
  cfg.t_end = 0.05;
  const RunResult r = run(z, nonlinear_params(), cfg);
  CHECK(r.outcome == Outcome::Completed);
  for (const auto& s : r.log.samples) {
    CHECK(s.l2sq == 0.0);
    CHECK(s.gradsq == 0.0);
    CHECK(s.sup == 0.0);
    CHECK(s.V == 0.0);
    CHECK(s.mass_residual == 0.0);
  }
}

TEST_CASE("linear heat flow decays at the ground-mode rate") {
  const Grid g = Grid::interval(0.0, 1.0, 65);
  const Field u0 = Field::sample(g, Boundary::Dirichlet, [](double x, double) { return std::sin(kPi * x); });
  for (double alpha : {0.0, 0.7}) {
    const ParamSet p = linear_params(1.0, alpha, 0.5);
    SolverConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_end = 0.2;
    const RunResult r = run(u0, p, cfg);
    const double want = std::exp((p.k - p.a * kPi * kPi) * cfg.t_end) * norm_l2(u0);
    CHECK(std::abs(norm_l2(r.u) - want) < 1e-8);
  }
}

TEST_CASE("property: linear flow is exact mode by mode") {
  const Grid grids[] = {Grid::interval(0.0, 2.0, 40), Grid::rectangle(-1, 1, 0, 1, 21, 17)};
  for (const Grid& g : grids) {
    for (Boundary bc : {Boundary::Dirichlet, Boundary::Neumann}) {
      const ParamSet p = linear_params(0.8, -0.6, 0.25);
      const EigenBasis b = eigenbasis(g, bc, 8);
      Stepper st(g, bc, p, Scheme::EigenbasisExponential);
      for (std::size_t m = 0; m < b.size(); ++m) {
        Field u = b.field(m);
        const double dt = 1e-2;
        for (int i = 0; i < 20; ++i) st.step(u, dt);
        const cplx f = std::exp((-cplx(p.a, p.alpha) * b.modes[m].mu + p.k) * (20 * dt));
        CHECK(max_diff(u, f * b.field(m)) < 1e-10 * std::max(1.0, std::abs(f)));
      }
    }
  }
}

TEST_CASE("finite-difference scheme agrees with the eigenbasis scheme") {
  const ParamSet p = nonlinear_params();
  for (const Grid& g : {Grid::interval(0.0, 1.0, 65), Grid::rectangle(0, 1, 0, 1, 33, 33)}) {
    for (Boundary bc : {Boundary::Dirichlet, Boundary::Neumann}) {
      const Field u0 = initial_field(g, bc, "random", 1.0, 3);
      SolverConfig cfg;
      cfg.dt = 1e-4;
      cfg.t_end = 0.01;
      const RunResult a = run(u0, p, cfg);
      cfg.scheme = Scheme::SemiImplicitFD;
      const RunResult b = run(u0, p, cfg);
      CHECK(a.outcome == Outcome::Completed);
      CHECK(b.outcome == Outcome::Completed);
      // both discretise the same flow; the gap is the O(h^2) stencil error
      CHECK(norm_l2(a.u - b.u) < 2e-2 * norm_l2(a.u));
    }
  }
}

TEST_CASE("spatially constant Neumann data stays on the orbit circle") {
  // b = -1, k = 1, c = 0: r0 = 1, freq = beta
  ParamSet p;
  p.a = 1.0;
  p.alpha = 0.3;
  p.b = -1.0;
  p.beta = 1.0;
  p.k = 1.0;
  p.sigma1 = 2.0;
  p.sigma2 = 4.0;
  const auto orbit = periodic_orbit_params(p);
  REQUIRE(orbit);
  const Grid g = Grid::interval(0.0, 1.0, 33);
  const Field u0(g, Boundary::Neumann, std::vector<cplx>(g.size(), orbit->r0));
  SolverConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_end = orbit->period;
  const RunResult r = run(u0, p, cfg);
  REQUIRE(r.outcome == Outcome::Completed);
  const cplx exact = orbit->r0 * std::exp(cplx(0.0, orbit->freq * cfg.t_end));
  for (std::size_t i = 0; i < r.u.size(); ++i) {
    CHECK(std::abs(std::abs(r.u[i]) - orbit->r0) < 1e-8);
    CHECK(std::abs(r.u[i] - r.u[0]) < 1e-12);
    CHECK(std::abs(r.u[i] - exact) < 1e-6);
  }
}

TEST_CASE("property: homogeneous Neumann runs embed the ODE") {
  // off the orbit: compare with a reference dopri5 solve of u' = (b+i beta)|u|^s1 u - (c+i gamma)|u|^s2 u + k u
  ParamSet p = nonlinear_params();
  p.b = 0.5;
  p.c = 1.0;
  p.k = 0.2;
  using State = std::array<double, 2>;
  for (cplx z0 : {cplx(0.5, 0.1), cplx(1.2, -0.4), cplx(0.0, 0.8)}) {
    const double T = 2.0;
    State s{z0.real(), z0.imag()};
    auto rhs = [&](const State& x, State& dx, double) {
      const cplx u(x[0], x[1]);
      const double r = std::abs(u);
      const cplx f = cplx(p.b, p.beta) * std::pow(r, p.sigma1) * u - cplx(p.c, p.gamma) * std::pow(r, p.sigma2) * u + p.k * u;
      dx = {f.real(), f.imag()};
    };
    namespace ode = boost::numeric::odeint;
    ode::integrate_adaptive(ode::make_controlled(1e-13, 1e-13, ode::runge_kutta_dopri5<State>()), rhs, s, 0.0, T, 1e-4);
    const Grid g = Grid::interval(0.0, 1.0, 17);
    const Field u0(g, Boundary::Neumann, std::vector<cplx>(g.size(), z0));
    SolverConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_end = T;
    const RunResult r = run(u0, p, cfg);
    CHECK(std::abs(r.u[5] - cplx(s[0], s[1])) < 1e-6);
  }
}

TEST_CASE("blow-up is detected") {
  const Grid g = Grid::interval(0.0, 1.0, 129);
  const Field u0 = Field::sample(g, Boundary::Dirichlet, [](double x, double) { return 6.0 * std::sin(kPi * x); });
  SolverConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_end = 1.0;
  cfg.diag_stride = 10;
  const RunResult r = run(u0, blowup_params(0.0, 0.0, 2.0, 4.0, 0.0), cfg);
  CHECK(r.outcome == Outcome::BlowUp);
  CHECK(std::isfinite(r.t_final));
  CHECK(r.t_final > 0.0);
  CHECK(r.t_final < 0.1);
  CHECK_FALSE(r.message.empty());
  // diagnostics cover the run up to the blow-up time
  CHECK(r.log.samples.back().t == Approx(r.t_final));
}

TEST_CASE("decay under the H1-stability hypotheses") {
  ParamSet p;
  p.a = 1.0;
  p.alpha = 0.5;
  p.b = 0.1;
  p.beta = 0.05;
  p.c = 1.0;
  p.gamma = 0.5;
  p.k = -1.0;
  p.sigma1 = 1.0;
  p.sigma2 = 2.0;
  const Grid g = Grid::interval(0.0, 1.0, 65);
  const Field u0 = initial_field(g, Boundary::Dirichlet, "random", 1.0, 2);
  CHECK(norm_h1(u0) == Approx(1.0));
  SolverConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_end = 1.0;
  const RunResult r = run(u0, p, cfg);
  CHECK(r.outcome == Outcome::Completed);
  CHECK(norm_h1(r.u) < 0.5 * norm_h1(u0));
}

TEST_CASE("run input validation") {
  const Grid g = Grid::interval(0.0, 1.0, 17);
  const Field u0 = initial_field(g, Boundary::Dirichlet, "mode", 2.0, 1);
  SolverConfig cfg;
  cfg.blowup_threshold = 1.0;
  CHECK_THROWS_AS(run(u0, nonlinear_params(), cfg), InputError);
  cfg = SolverConfig{};
  cfg.diag_stride = 0;
  CHECK_THROWS_AS(run(u0, nonlinear_params(), cfg), InputError);
  Stepper st(g, Boundary::Neumann, nonlinear_params(), Scheme::EigenbasisExponential);
  Field v = u0;
  CHECK_THROWS_AS(st.step(v, 1e-3), ShapeError);
  CHECK(default_dt(g, nonlinear_params(), Scheme::EigenbasisExponential) == 1e-3);
  CHECK(default_dt(g, nonlinear_params(), Scheme::SemiImplicitFD) == Approx(0.25 * g.hx() * g.hx()));
  CHECK(scheme_from_string("fd") == Scheme::SemiImplicitFD);
  CHECK_THROWS_AS(scheme_from_string("leapfrog"), InputError);
}

TEST_CASE("diagnostics log") {
  const Grid g = Grid::interval(0.0, 1.0, 33);
  const Field u0 = initial_field(g, Boundary::Dirichlet, "random", 0.5, 4);
  SolverConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_end = 0.0105;
  cfg.diag_stride = 3;
  const RunResult r = run(u0, nonlinear_params(), cfg);
  CHECK(r.log.samples.front().t == 0.0);
  CHECK(r.log.samples.back().t == Approx(cfg.t_end));
  for (std::size_t i = 1; i < r.log.samples.size(); ++i) CHECK(r.log.samples[i].t > r.log.samples[i - 1].t);
  CHECK(DiagnosticsLog::columns().size() == 10);
  CHECK(DiagnosticsLog::columns()[0] == "t");
}

TEST_CASE("three-point time derivative") {
  const std::vector<double> t{0.0, 0.1, 0.25, 0.3, 0.7};
  std::vector<double> y(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) y[i] = 3.0 - 2.0 * t[i] + 5.0 * t[i] * t[i];
  const auto d = time_derivative(t, y);
  for (std::size_t i = 0; i < t.size(); ++i) CHECK(d[i] == Approx(-2.0 + 10.0 * t[i]));
}

TEST_CASE("property: gauge equivariance") {
  const ParamSet p = nonlinear_params();
  for (const Grid& g : {Grid::interval(0.0, 1.0, 65), Grid::rectangle(0, 1, 0, 2, 17, 25)}) {
    for (Boundary bc : {Boundary::Dirichlet, Boundary::Neumann}) {
      for (Scheme sc : {Scheme::EigenbasisExponential, Scheme::SemiImplicitFD}) {
        const Field u0 = initial_field(g, bc, "random", 1.0, 8);
        for (double phase : {0.4, 2.5, -1.9}) {
          const cplx rot = std::polar(1.0, phase);
          Field u = u0, v = rot * u0;
          Stepper st(g, bc, p, sc);
          const double dt = sc == Scheme::EigenbasisExponential ? 1e-3 : 1e-4;
          for (int i = 0; i < 200; ++i) {
            st.step(u, dt);
            st.step(v, dt);
          }
          CHECK(max_diff(v, rot * u) < 1e-10 * std::max(1.0, sup_norm(u)));
        }
      }
    }
  }
}

TEST_CASE("property: mass balance converges under joint refinement") {
  const double r1 = mass_residual_max(33, 2e-3);
  const double r2 = mass_residual_max(65, 1e-3);
  const double r3 = mass_residual_max(129, 5e-4);
  CHECK(std::log2(r1 / r2) >= 1.8);
  CHECK(std::log2(r2 / r3) >= 1.8);
}
