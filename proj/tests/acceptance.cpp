// Acceptance suite: one PASS/FAIL line per criterion, tolerances pinned below.
// Exit status is the number of failed criteria (0 when all pass).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "cgl/bifurcation.hpp"
#include "cgl/boundstate.hpp"
#include "cgl/discretization.hpp"
#include "cgl/errors.hpp"
#include "cgl/evolution.hpp"
#include "cgl/floquet.hpp"
#include "cgl/params.hpp"
#include "cgl/scenario.hpp"
#include "cgl/stability.hpp"

using namespace cgl;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome_ {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double time_limit;  // seconds, 0 = none
  std::function<Outcome_()> body;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

struct Detail {
  std::ostringstream s;
  bool ok = true;
  // Records "name=value (rel lim)" and folds the comparison into ok.
  Detail& le(const char* name, double v, double lim) {
    const bool p = v <= lim;
    ok = ok && p;
    s << name << '=' << fmt("%.3e", v) << (p ? " <= " : " !<= ") << fmt("%.1e", lim) << "; ";
    return *this;
  }
  Detail& ge(const char* name, double v, double lim) {
    const bool p = v >= lim;
    ok = ok && p;
    s << name << '=' << fmt("%.4g", v) << (p ? " >= " : " !>= ") << fmt("%.4g", lim) << "; ";
    return *this;
  }
  Detail& is(const char* name, bool v, const std::string& shown) {
    ok = ok && v;
    s << name << '=' << shown << (v ? "" : " (unexpected)") << "; ";
    return *this;
  }
  Outcome_ done() const { return {ok, s.str()}; }
};

BoundStateSpec bs_spec() {
  BoundStateSpec s;
  s.theta = 0.0;
  s.omega = 1.0;
  s.k = 0.0;
  s.sigma1 = 2.0;
  s.sigma2 = 4.0;
  s.chi = 1;
  return s;
}

double bs_residual(int n) {
  const BoundStateSpec s = bs_spec();
  const NlsCoeffs c = compute_coeffs(s);
  const Profile p = solve_profile(c, s.chi, s.sigma1, s.sigma2, 20.0, n);
  return residual_bs(assemble(p, c), s);
}

double max_H_ratio(const Profile& p) {
  const auto H = first_integral(p);
  double m = 0.0;
  for (double h : H) m = std::max(m, std::abs(h));
  return m / std::max(1.0, p.eps * p.x0 * p.x0);
}

Profile soliton_profile() {
  NlsCoeffs c;
  c.epsilon = 1.0;
  c.eta1 = 1.0;
  c.eta2 = 0.0;
  return solve_profile(c, 1, 2.0, 4.0, 20.0, 4096);
}

// Blow-up scenario: theta = 0, k = 0, nu = 0, sigma1 = 2 on (0,1).
double blowup_time(double dt, int n, bool* blew, std::string* msg) {
  const Grid g = Grid::interval(0.0, 1.0, n);
  const Field u0 = Field::sample(g, Boundary::Dirichlet, [](double x, double) { return 6.0 * std::sin(kPi * x); });
  SolverConfig cfg;
  cfg.dt = dt;
  cfg.t_end = 1.0;
  cfg.diag_stride = 100;
  const RunResult r = run(u0, blowup_params(0.0, 0.0, 2.0, 4.0, 0.0), cfg);
  *blew = r.outcome == Outcome::BlowUp;
  *msg = r.message;
  return r.t_final;
}

ParamSet decay_params() {
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
  return p;
}

// Largest interior mass-balance residual of a smooth nonlinear run.
double mass_balance(int n, double dt) {
  ParamSet p;
  p.a = 1.0;
  p.alpha = 0.3;
  p.b = 1.0;
  p.beta = 0.5;
  p.c = 0.5;
  p.gamma = 0.2;
  p.k = 0.5;
  p.sigma1 = 2.0;
  p.sigma2 = 4.0;
  const Grid g = Grid::interval(0.0, 1.0, n);
  const Field u0 = Field::sample(g, Boundary::Dirichlet, [](double x, double) {
    return cplx(std::sin(kPi * x) + 0.3 * std::sin(2 * kPi * x), 0.2 * std::sin(3 * kPi * x));
  });
  SolverConfig cfg;
  cfg.dt = dt;
  cfg.t_end = 0.05;
  const RunResult r = run(u0, p, cfg);
  double m = 0.0;
  for (const auto& s : r.log.samples) m = std::max(m, s.mass_residual);
  return m;
}

ParamSet case1(double b, double k) {
  ParamSet p;
  p.a = 1.0;
  p.b = b;
  p.k = k;
  p.beta = 1.0;
  p.c = 0.0;
  p.gamma = 0.0;
  p.sigma1 = 2.0;
  p.sigma2 = 4.0;
  return p;
}

ParamSet case2(double b, double c) {
  ParamSet p;
  p.a = 1.0;
  p.b = b;
  p.c = c;
  p.k = 0.0;
  p.beta = 1.0;
  p.gamma = 0.0;
  p.sigma1 = 1.0;
  p.sigma2 = 3.0;
  return p;
}

TrigParamSet square_trig() {
  TrigParamSet t;
  t.theta = 0.0;
  t.gamma1 = 0.0;
  t.gamma2 = 0.0;
  t.chi = -1;
  t.k = 0.0;
  t.sigma1 = 2.0;
  t.sigma2 = 4.0;
  return t;
}

std::vector<Criterion> criteria() {
  std::vector<Criterion> cs;

  cs.push_back({1, "bound-state residual and convergence order", 5.0, [] {
                  const double r1 = bs_residual(2048), r2 = bs_residual(4096);
                  return Detail().le("residual(n=4096)", r2, 1e-4).ge("order", std::log2(r1 / r2), 1.9).done();
                }});

  cs.push_back({2, "single-power soliton oracle", 1.0, [] {
                  const Profile p = soliton_profile();
                  double err = 0.0;
                  for (int i = 0; i < p.grid.nx(); ++i) {
                    const double x = p.grid.x(i);
                    if (std::abs(x) > 10.0) continue;
                    err = std::max(err, std::abs(p.psi[i] - std::sqrt(2.0) / std::cosh(x)));
                  }
                  return Detail().le("max error on [-10,10]", err, 1e-8).done();
                }});

  cs.push_back({3, "first-integral conservation", 0.0, [] {
                  Detail d;
                  const BoundStateSpec s = bs_spec();
                  const NlsCoeffs c = compute_coeffs(s);
                  d.le("H/scale (two-power)", max_H_ratio(solve_profile(c, 1, 2.0, 4.0, 20.0, 4096)), 1e-8);
                  d.le("H/scale (soliton)", max_H_ratio(soliton_profile()), 1e-8);
                  NlsCoeffs cm;
                  cm.epsilon = 1.0;
                  cm.eta1 = 1.0;
                  cm.eta2 = 0.01;
                  d.le("H/scale (chi=-1)", max_H_ratio(solve_profile(cm, -1, 2.0, 4.0, 25.0, 4096)), 1e-8);
                  return d.done();
                }});

  cs.push_back({4, "negative energy and finite-time blow-up", 30.0, [] {
                  Detail d;
                  const Grid g = Grid::interval(0.0, 1.0, 513);
                  const Field u0 =
                      Field::sample(g, Boundary::Dirichlet, [](double x, double) { return 6.0 * std::sin(kPi * x); });
                  const BlowupEnergy e = blowup_energy(u0, 0.0, 0.0, 2.0, 4.0, 0.0);
                  d.le("|E - (9pi^2 - 121.5)|", std::abs(e.energy - (9 * kPi * kPi - 121.5)), 1e-3);
                  d.is("E<0", e.energy < 0.0, fmt("%.5f", e.energy));
                  bool b1 = false, b2 = false;
                  std::string m1, m2;
                  const double t1 = blowup_time(1e-3, 257, &b1, &m1);
                  const double t2 = blowup_time(5e-4, 257, &b2, &m2);
                  d.is("BlowUp(dt)", b1, fmt("t*=%.6f", t1));
                  d.is("BlowUp(dt/2)", b2, fmt("t*=%.6f", t2));
                  d.le("relative change under dt halving", std::abs(t1 - t2) / t2, 0.10);
                  return d.done();
                }});

  cs.push_back({5, "H1 stability and decay", 60.0, [] {
                  Detail d;
                  const ParamSet p = decay_params();
                  d.is("h1_stable", classify(p).h1_stable(), "true");
                  const Grid g = Grid::interval(0.0, 1.0, 129);
                  const Field u0 = initial_field(g, Boundary::Dirichlet, "random", 1.0, 1);
                  SolverConfig cfg;
                  cfg.dt = 1e-3;
                  cfg.t_end = 5.0;
                  const RunResult r = run(u0, p, cfg);
                  d.is("outcome", r.outcome == Outcome::Completed, to_string(r.outcome));
                  const LyapunovReport rep = verify_decay(r.log, Functional::H1);
                  d.is("V nonincreasing", rep.monotone, fmt("max increase %.2e", rep.max_increase));
                  d.le("|u(5)|_H1/|u0|_H1", norm_h1(r.u) / norm_h1(u0), 0.5);
                  return d.done();
                }});

  cs.push_back({6, "energy identity convergence", 0.0, [] {
                  const double r1 = mass_balance(65, 1e-3), r2 = mass_balance(129, 5e-4);
                  Detail d;
                  d.s << "residual " << fmt("%.3e", r1) << " -> " << fmt("%.3e", r2) << "; ";
                  return d.ge("joint order", std::log2(r1 / r2), 1.8).done();
                }});

  cs.push_back({7, "Floquet product formula, case 1", 5.0, [] {
                  Detail d;
                  const PeriodicOrbit o = build_orbit(case1(-1.0, 1.0));
                  const Monodromy m = monodromy(o, 0.0);
                  d.le("|log det + 4pi|/4pi", std::abs(m.log_det + 4 * kPi) / (4 * kPi), 1e-8);
                  const double unit = std::min(std::abs(m.multipliers[0] - 1.0), std::abs(m.multipliers[1] - 1.0));
                  d.le("|trivial multiplier - 1|", unit, 1e-6);
                  const Grid dom = Grid::interval(0.0, 1.0, 129);
                  const MonodromyReport ok = stability_verdict(o, dom);
                  d.is("verdict(b=-1,k=1)", ok.verdict == Verdict::OrbitallyStable, to_string(ok.verdict));
                  const PeriodicOrbit ou = build_orbit(case1(1.0, -1.0));
                  const MonodromyReport bad = stability_verdict(ou, dom);
                  d.is("verdict(b=1,k=-1)", bad.verdict == Verdict::Unstable, to_string(bad.verdict));
                  const double te = instability_blowup_demo(ou, 10);
                  d.is("escape time finite", std::isfinite(te) && te > 0.0, fmt("%.6f", te));
                  return d.done();
                }});

  cs.push_back({8, "Floquet case 2", 5.0, [] {
                  Detail d;
                  const PeriodicOrbit o = build_orbit(case2(1.0, 1.0));
                  const Grid dom = Grid::interval(0.0, 1.0, 129);
                  const MonodromyReport rep = stability_verdict(o, dom);
                  d.is("verdict(b=c=1)", rep.verdict == Verdict::OrbitallyStable, to_string(rep.verdict));
                  const Monodromy m = monodromy(o, 0.0);
                  const double want = std::exp(-2.0 * o.period);
                  const double got = std::min(std::abs(m.multipliers[0] - want), std::abs(m.multipliers[1] - want));
                  d.le("|nontrivial multiplier - e^{-2T}|", got, 1e-6);
                  const MonodromyReport bad = stability_verdict(build_orbit(case2(-1.0, -1.0)), dom);
                  d.is("verdict(b=c=-1)", bad.verdict == Verdict::Unstable, to_string(bad.verdict));
                  return d.done();
                }});

  cs.push_back({9, "bifurcation polynomial and its roots", 10.0, [] {
                  Detail d;
                  const DoubleEigenpair pair = square_pair(128);
                  double err = 0.0;
                  for (double a : {-1.5, -0.5, 0.5, 1.5, 2.0})
                    err = std::max(err, std::abs(eval_P(pair, a, 2.0) - 3.0 / 16.0 * (a * a * a - a)));
                  d.le("max |P - 3/16(a^3-a)|", err, 1e-6);
                  const auto roots = find_roots_P(pair, 2.0);
                  double rerr = 0.0;
                  for (double want : {-1.0, 0.0, 1.0}) {
                    double best = 1e300;
                    for (const auto& r : roots) best = std::min(best, std::abs(r.alpha0 - want));
                    rerr = std::max(rerr, best);
                  }
                  d.le("real roots {-1,0,1}", rerr, 1e-8);
                  int real_roots = 0;
                  std::string others;
                  for (const auto& r : roots) {
                    if (std::abs(r.alpha0.imag()) < 1e-8)
                      ++real_roots;
                    else
                      others += fmt("%+.6f", r.alpha0.real()) + fmt("%+.6fi ", r.alpha0.imag());
                  }
                  d.is("real root count", real_roots == 3, std::to_string(real_roots));
                  d.s << "non-real roots: " << (others.empty() ? "none" : others) << "; ";
                  return d.done();
                }});

  cs.push_back({10, "branch asymptotics", 120.0, [] {
                  Detail d;
                  const DoubleEigenpair pair = square_pair(128);
                  const TrigParamSet t = square_trig();
                  const BifurcationProblem prob(pair, t);
                  std::vector<double> eps{0.0};
                  for (int i = 1; i <= 10; ++i) eps.push_back(1e-3 * i);
                  const Branch br = prob.continue_branch(0.0, eps);
                  d.is("complete", !br.truncated, br.truncated ? br.message : "yes");
                  double res = 0.0;
                  for (const auto& p : br.points) res = std::max(res, p.residual);
                  d.le("max Galerkin residual", res, 1e-8);
                  const AsymptoticReport a = asymptotic_check(br, pair, t);
                  d.le("|C_quad - 9/16|", std::abs(a.coefficient_quadrature - 9.0 / 16.0), 1e-6);
                  d.le("relative deviation of fit", a.relative_deviation, 0.05);
                  d.s << "fit=" << fmt("%.6f", a.coefficient_fit.real()) << "; ";
                  // truncation monitor: last point recomputed with twice the modes
                  const BranchPoint& last = br.points.back();
                  const BranchPoint wide =
                      solve_branch_point(pair, t, last.eps, last.alpha, last.lambda, 800);
                  d.le("|lambda(400) - lambda(800)|", std::abs(wide.lambda - last.lambda), 1e-8);
                  return d.done();
                }});

  cs.push_back({11, "inner solution scaling", 0.0, [] {
                  const DoubleEigenpair pair = square_pair(128);
                  const TrigParamSet t = square_trig();
                  const BifurcationProblem prob(pair, t);
                  const cplx lam0 = pair.lambda0;
                  std::vector<double> le, ly;
                  for (double e : {1e-3, 2e-3, 4e-3}) {
                    le.push_back(std::log(e));
                    ly.push_back(std::log(prob.y_h1(prob.solve_y(e, 0.0, lam0).coeffs)));
                  }
                  // Least-squares slope.
                  const double mx = (le[0] + le[1] + le[2]) / 3, my = (ly[0] + ly[1] + ly[2]) / 3;
                  double sxy = 0, sxx = 0;
                  for (int i = 0; i < 3; ++i) {
                    sxy += (le[i] - mx) * (ly[i] - my);
                    sxx += (le[i] - mx) * (le[i] - mx);
                  }
                  return Detail().ge("log-log slope", sxy / sxx, t.sigma1 + 0.9).done();
                }});

  cs.push_back({12, "gauge equivariance of the evolution", 0.0, [] {
                  ParamSet p;
                  p.a = 1.0;
                  p.alpha = 0.7;
                  p.b = 1.0;
                  p.beta = -0.4;
                  p.c = 0.5;
                  p.gamma = 0.3;
                  p.k = 0.2;
                  p.sigma1 = 2.0;
                  p.sigma2 = 3.0;
                  const Grid g = Grid::interval(0.0, 1.0, 129);
                  const Field u0 = initial_field(g, Boundary::Dirichlet, "random", 1.0, 7);
                  const cplx rot = std::polar(1.0, 0.83);
                  Field u = u0, v = rot * u0;
                  Stepper st(g, Boundary::Dirichlet, p, Scheme::EigenbasisExponential);
                  for (int i = 0; i < 1000; ++i) {
                    st.step(u, 1e-3);
                    st.step(v, 1e-3);
                  }
                  const double err = norm_l2(v - rot * u) / std::max(1e-300, norm_l2(u));
                  double abs_err = 0.0;
                  for (std::size_t i = 0; i < u.size(); ++i) abs_err = std::max(abs_err, std::abs(v[i] - rot * u[i]));
                  return Detail().le("max node error", abs_err, 1e-10).le("relative L2 error", err, 1e-10).done();
                }});

  return cs;
}

}  // namespace

int main() {
  int failed = 0;
  for (const auto& c : criteria()) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome_ r;
    try {
      r = c.body();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.time_limit > 0.0 && secs > c.time_limit) {
      r.pass = false;
      r.detail += fmt("runtime %.2f s exceeds ", secs) + fmt("%.0f s; ", c.time_limit);
    }
    std::printf("%s [%2d] %s: %s(%.2f s)\n", r.pass ? "PASS" : "FAIL", c.id, c.name, r.detail.c_str(), secs);
    std::fflush(stdout);
    if (!r.pass) ++failed;
  }
  std::printf("%d of 12 criteria failed\n", failed);
  return failed;
}
