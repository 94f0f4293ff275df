#include "cgl/floquet.hpp"

#include <algorithm>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <limits>

#include "cgl/errors.hpp"

namespace cgl {

namespace {

// The period map is accumulated in extended precision: strongly unstable
// orbits otherwise hit a roundoff floor above the step-doubling tolerance.
using real = long double;
using MatL = std::array<std::array<real, 2>, 2>;

template <class M>
M mul(const M& a, const M& b) {
  M c{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
  return c;
}

MatL widen(const Mat2& m) {
  MatL w{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) w[i][j] = m[i][j];
  return w;
}

template <class F>
MatL rk4_step(F&& rhs_matrix, real t, real h, const MatL& w) {
  const MatL a0 = widen(rhs_matrix(t)), a1 = widen(rhs_matrix(t + 0.5L * h)), a2 = widen(rhs_matrix(t + h));
  const MatL k1 = mul(a0, w);
  MatL tmp{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) tmp[i][j] = w[i][j] + 0.5L * h * k1[i][j];
  const MatL k2 = mul(a1, tmp);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) tmp[i][j] = w[i][j] + 0.5L * h * k2[i][j];
  const MatL k3 = mul(a1, tmp);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) tmp[i][j] = w[i][j] + h * k3[i][j];
  const MatL k4 = mul(a2, tmp);
  MatL out = w;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out[i][j] += h / 6.0L * (k1[i][j] + 2.0L * k2[i][j] + 2.0L * k3[i][j] + k4[i][j]);
  return out;
}

// Period map kept as W = Q R with Q orthogonal and
// R = [[e^l1, t e^l1], [0, e^l2]], so neither overflow nor the
// cancellation in det W limits the small multiplier.
struct Factored {
  MatL q{{{1.0L, 0.0L}, {0.0L, 1.0L}}};
  real l1 = 0.0L, l2 = 0.0L, t = 0.0L;
};

template <class F>
Factored integrate_rk4(F&& rhs_matrix, double T, int steps) {
  Factored f;
  const real h = static_cast<real>(T) / steps;
  for (int s = 0; s < steps; ++s) {
    const MatL w = rk4_step(rhs_matrix, s * h, h, f.q);
    const real r11 = std::hypot(w[0][0], w[1][0]);
    if (!(r11 > 0.0L) || !std::isfinite(r11)) throw NumericalError("monodromy integration degenerated");
    const real q00 = w[0][0] / r11, q10 = w[1][0] / r11;
    const real r12 = q00 * w[0][1] + q10 * w[1][1];
    const real v0 = w[0][1] - r12 * q00, v1 = w[1][1] - r12 * q10;
    const real r22 = std::hypot(v0, v1);
    if (!(r22 > 0.0L) || !std::isfinite(r22)) throw NumericalError("monodromy integration degenerated");
    f.t += r12 / r11 * std::exp(f.l2 - f.l1);
    f.l1 += std::log(r11);
    f.l2 += std::log(r22);
    f.q = MatL{{{q00, v0 / r22}, {q10, v1 / r22}}};
  }
  return f;
}

// Q R scaled by exp(-shift).
Mat2 scaled(const Factored& f, real shift) {
  const real e1 = std::exp(f.l1 - shift), e2 = std::exp(f.l2 - shift);
  const MatL m = mul(f.q, MatL{{{e1, f.t * e1}, {0.0L, e2}}});
  Mat2 out{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out[i][j] = static_cast<double>(m[i][j]);
  return out;
}

struct Spectrum {
  std::array<std::complex<double>, 2> phase;  // unit modulus
  std::array<double, 2> log_abs;
};

// Eigenvalues of exp(shift) * m where ln|det m| = log_det_m is known accurately.
Spectrum eig_logscaled(const Mat2& m, double log_det_m, double det_sign, double shift) {
  Spectrum s;
  const double tr = m[0][0] + m[1][1];
  const double det = det_sign * std::exp(log_det_m);
  const double disc = 0.25 * tr * tr - det;
  if (disc >= 0.0) {
    const double big = 0.5 * tr + std::copysign(std::sqrt(disc), tr);
    if (big == 0.0) {
      s.phase = {1.0, 1.0};
      s.log_abs = {-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
      return s;
    }
    const double lb = std::log(std::abs(big));
    s.phase = {std::copysign(1.0, big), std::copysign(1.0, big) * det_sign};
    s.log_abs = {lb + shift, log_det_m - lb + shift};
    return s;
  }
  const std::complex<double> z(0.5 * tr, std::sqrt(-disc));
  s.phase = {z / std::abs(z), std::conj(z) / std::abs(z)};
  s.log_abs = {0.5 * log_det_m + shift, 0.5 * log_det_m + shift};
  return s;
}

double max_abs(const Mat2& m) {
  return std::max({std::abs(m[0][0]), std::abs(m[0][1]), std::abs(m[1][0]), std::abs(m[1][1])});
}

// Largest eigenvalue of the symmetric part of B(t) + k I over one period.
double log_norm_bound(const PeriodicOrbit& orbit) {
  double s = -std::numeric_limits<double>::infinity();
  const int samples = 64;
  for (int i = 0; i <= samples; ++i) {
    const Mat2 b = assemble_B(orbit, orbit.period * i / samples);
    const double p = b[0][0], q = 0.5 * (b[0][1] + b[1][0]), r = b[1][1];
    const double top = 0.5 * (p + r) + std::sqrt(0.25 * (p - r) * (p - r) + q * q);
    s = std::max(s, top + orbit.params.k);
  }
  return s;
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::OrbitallyStable: return "OrbitallyStable";
    case Verdict::Unstable: return "Unstable";
    case Verdict::Inconclusive: return "Inconclusive";
  }
  return "Inconclusive";
}

PeriodicOrbit build_orbit(const ParamSet& p) {
  const auto o = periodic_orbit_params(p);
  if (!o) throw HypothesisError("parameters admit no homogeneous periodic orbit (need c = 0, bk < 0 or k = 0, bc > 0)");
  if (o->degenerate)
    throw HypothesisError("orbit frequency is zero; the circle consists of equilibria");
  return PeriodicOrbit{o->r0, o->freq, o->period, o->which, p};
}

Mat2 assemble_B(const PeriodicOrbit& orbit, double t) {
  const ParamSet& p = orbit.params;
  const double r = orbit.r0;
  const double c1 = std::cos(orbit.freq * t), c2 = std::sin(orbit.freq * t);
  const double r1 = r > 0.0 ? std::pow(r, p.sigma1) : 0.0;
  const double r2 = r > 0.0 ? std::pow(r, p.sigma2) : 0.0;
  // sigma r^{sigma-2} theta_i theta_j = sigma r^sigma c_i c_j.
  const double q1 = p.sigma1 * r1, q2 = p.sigma2 * r2;
  // Coefficients multiplying Re(conj(theta) v) / r in the real and imaginary rows.
  const double x = p.b * q1 * c1 - p.beta * q1 * c2 - p.c * q2 * c1 + p.gamma * q2 * c2;
  const double y = p.b * q1 * c2 + p.beta * q1 * c1 - p.c * q2 * c2 - p.gamma * q2 * c1;
  const double diag = p.b * r1 - p.c * r2;
  const double rot = p.beta * r1 - p.gamma * r2;
  Mat2 m{};
  m[0][0] = diag + x * c1;
  m[0][1] = -rot + x * c2;
  m[1][0] = rot + y * c1;
  m[1][1] = diag + y * c2;
  return m;
}

double expected_log_det(const PeriodicOrbit& orbit, double mu_delta) {
  const Mat2 b = assemble_B(orbit, 0.0);
  const double tr = b[0][0] + b[1][1];
  return orbit.period * (tr + 2.0 * orbit.params.k - 2.0 * orbit.params.a * mu_delta);
}

Monodromy monodromy(const PeriodicOrbit& orbit, double mu_delta, int steps) {
  if (!(mu_delta >= 0.0)) throw InputError("mu_delta must be >= 0");
  if (!(orbit.period > 0.0) || !std::isfinite(orbit.period))
    throw InputError("orbit period must be positive and finite");
  if (steps < 1) throw InputError("steps must be positive");
  const ParamSet& p = orbit.params;
  const double am = p.alpha * mu_delta;
  auto rhs = [&](double t) {
    Mat2 m = assemble_B(orbit, t);
    m[0][0] += p.k;
    m[1][1] += p.k;
    m[0][1] += am;
    m[1][0] -= am;
    return m;
  };
  Monodromy out;
  out.mu_delta = mu_delta;
  out.lambda = std::complex<double>(p.a, p.alpha) * mu_delta;

  const double base_scale = -p.a * mu_delta * orbit.period;
  auto spectrum = [](const Factored& f) {
    const double shift = std::max(f.l1, f.l2);
    const double det_q = f.q[0][0] * f.q[1][1] - f.q[0][1] * f.q[1][0];
    return eig_logscaled(scaled(f, shift), f.l1 + f.l2 - 2.0 * shift, std::copysign(1.0, det_q), shift);
  };

  int n = steps;
  Factored coarse = integrate_rk4(rhs, orbit.period, n);
  Spectrum sc = spectrum(coarse);
  for (;;) {
    const Factored fine = integrate_rk4(rhs, orbit.period, 2 * n);
    const Spectrum sf = spectrum(fine);
    const double shift = std::max(fine.l1, fine.l2);
    const Mat2 mf = scaled(fine, shift), mc = scaled(coarse, shift);
    double err = 0.0;
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) err = std::max(err, std::abs(mf[i][j] - mc[i][j]) / std::max(1.0, max_abs(mf)));
      if (std::isfinite(sf.log_abs[i]) || std::isfinite(sc.log_abs[i]))
        err = std::max(err, std::abs(sf.log_abs[i] - sc.log_abs[i]) / std::max(1.0, std::abs(sf.log_abs[i])));
    }
    if (!std::isfinite(err)) err = std::numeric_limits<double>::infinity();
    if (err < 1e-10) {
      const double s = std::max(coarse.l1, coarse.l2);
      out.matrix = scaled(coarse, s);
      out.log_scale = base_scale + s;
      out.log_det = coarse.l1 + coarse.l2 + 2.0 * base_scale;
      for (int i = 0; i < 2; ++i) {
        out.log_abs[i] = sc.log_abs[i] + base_scale;
        out.multipliers[i] = std::exp(out.log_abs[i]) * sc.phase[i];
      }
      out.steps = n;
      out.step_doubling_error = err;
      break;
    }
    n *= 2;
    coarse = fine;
    sc = sf;
    if (n > (1 << 20))
      throw NumericalError("monodromy step-doubling check failed at 2^20 steps");
  }
  return out;
}

double product_check(const PeriodicOrbit& orbit, double mu_delta, const Monodromy& m) {
  const double expected = expected_log_det(orbit, mu_delta);
  return std::abs(m.log_det - expected) / std::max(1.0, std::abs(m.log_det));
}

std::vector<double> neumann_spectrum(const Grid& domain, double mu_max, std::size_t max_count) {
  std::vector<double> mus;
  const double lx = domain.lx();
  const double ly = domain.dim() == 2 ? domain.ly() : 0.0;
  for (int j = 0;; ++j) {
    const double my = domain.dim() == 2 ? mode_eigenvalue_1d(j, ly) : 0.0;
    if (my > mu_max) break;
    for (int i = 0;; ++i) {
      const double m = mode_eigenvalue_1d(i, lx) + my;
      if (m > mu_max) break;
      mus.push_back(m);
    }
    if (domain.dim() == 1) break;
  }
  std::sort(mus.begin(), mus.end());
  if (mus.size() > max_count) mus.resize(max_count);
  return mus;
}

MonodromyReport stability_verdict(const PeriodicOrbit& orbit, const Grid& domain, int steps) {
  const ParamSet& p = orbit.params;
  MonodromyReport rep;
  rep.radial_coefficient = orbit.which == PeriodicCase::Case2_k0
                               ? -p.c * (p.sigma2 - p.sigma1) * std::pow(orbit.r0, p.sigma2)
                               : p.sigma1 * p.b * std::pow(orbit.r0, p.sigma1);

  // Every multiplier satisfies |m| <= exp((s - a mu) T) with s the log-norm
  // bound of B + k I, so mu >= (s + ln 2 / T)/a gives |m| <= 1/2.
  const double s = log_norm_bound(orbit);
  rep.mu_cutoff = std::max(0.0, (s + std::log(2.0) / orbit.period) / p.a);
  const auto mus = neumann_spectrum(domain, rep.mu_cutoff, 100000);

  rep.log_margin = -std::numeric_limits<double>::infinity();
  bool inconclusive = false, unstable = false;
  for (double mu : mus) {
    MonodromyEntry e;
    e.mono = monodromy(orbit, mu, steps);
    e.product_error = product_check(orbit, mu, e.mono);
    if (mu == 0.0) {
      e.has_trivial = true;
      e.trivial_index = std::abs(e.mono.multipliers[0] - 1.0) <= std::abs(e.mono.multipliers[1] - 1.0) ? 0 : 1;
      rep.trivial_error = std::abs(e.mono.multipliers[e.trivial_index] - 1.0);
    }
    for (int i = 0; i < 2; ++i) {
      if (i == e.trivial_index) continue;
      const double la = e.mono.log_abs[i];
      rep.log_margin = std::max(rep.log_margin, la);
      if (la > 1e-8) unstable = true;
      else if (la > -1e-8) inconclusive = true;
    }
    rep.entries.push_back(std::move(e));
  }
  rep.margin = std::exp(rep.log_margin);

  if (unstable || rep.radial_coefficient > 0.0) {
    rep.verdict = Verdict::Unstable;
    rep.reason = unstable ? "a nontrivial multiplier lies outside the unit circle"
                          : "the radial linearisation coefficient is positive";
  } else if (inconclusive) {
    rep.verdict = Verdict::Inconclusive;
    rep.reason = "a nontrivial multiplier lies within 1e-8 of the unit circle";
  } else {
    rep.verdict = Verdict::OrbitallyStable;
    rep.reason = "all nontrivial multipliers lie inside the unit disk";
  }
  return rep;
}

double instability_blowup_demo(const PeriodicOrbit& orbit, int n) {
  const ParamSet& p = orbit.params;
  const bool case1 = p.c == 0.0 && p.b > 0.0 && p.k < 0.0;
  const bool case2 = p.k == 0.0 && p.b < 0.0 && p.c < 0.0;
  if (!case1 && !case2)
    throw HypothesisError("blow-up demonstration needs the unstable branch (b > 0, k < 0, c = 0 or b < 0, c < 0, k = 0)");
  if (n < 1) throw InputError("n must be >= 1");

  namespace ode = boost::numeric::odeint;
  using State = std::array<double, 1>;
  // s = ln rho: s' = k + b e^{s1 s} - c e^{s2 s}.
  auto rhs = [&p](const State& x, State& dx, double) {
    dx[0] = p.k + p.b * std::exp(p.sigma1 * x[0]) - p.c * std::exp(p.sigma2 * x[0]);
  };
  const double target = std::log(1e8);
  State x{std::log(orbit.r0 + 1.0 / n)};
  auto stepper = ode::make_dense_output(1e-12, 1e-12, ode::runge_kutta_dopri5<State>());
  stepper.initialize(x, 0.0, 1e-3);
  const double t_max = 1e6;
  while (stepper.current_time() < t_max) {
    const State before = stepper.current_state();
    stepper.do_step(rhs);
    const State after = stepper.current_state();
    if (!(after[0] >= before[0]))
      throw HypothesisError("perturbed orbit decays; parameters are not on the unstable branch");
    if (after[0] >= target) {
      double lo = stepper.previous_time(), hi = stepper.current_time();
      State mid;
      for (int it = 0; it < 100 && hi - lo > 1e-15 * hi; ++it) {
        const double tm = 0.5 * (lo + hi);
        stepper.calc_state(tm, mid);
        (mid[0] < target ? lo : hi) = tm;
      }
      return 0.5 * (lo + hi);
    }
  }
  throw HypothesisError("no escape before t = 1e6");
}

}  // namespace cgl
