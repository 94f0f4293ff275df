#include "cgl/stability.hpp"

#include <algorithm>
#include <cmath>

#include "cgl/errors.hpp"

namespace cgl {

double eval_Wp(const Field& u, double p) {
  if (!(p >= 2.0)) throw InputError("W_p needs p >= 2");
  return lp_power(u, p);
}

double eval_V(const Field& u, const ParamSet& p) {
  return 0.5 * p.a * grad_sq(u) - p.b * lp_power(u, p.sigma1 + 2.0) / (p.sigma1 + 2.0) +
         p.c * lp_power(u, p.sigma2 + 2.0) / (p.sigma2 + 2.0) - 0.5 * p.k * lp_power(u, 2.0);
}

double vdot_integral(const Field& u, const ParamSet& p) {
  const Field lap = laplacian(u);
  const auto& w = u.grid().weights();
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double m = std::abs(u[i]);
    const cplx r = p.a * lap[i] + (p.b * std::pow(m, p.sigma1) - p.c * std::pow(m, p.sigma2) + p.k) * u[i];
    s += w[i] * std::norm(r);
  }
  return -s;
}

double eval_Vdot(const Field& u, const ParamSet& p) {
  const BranchReport prop = proportionality(p);
  if (!prop.satisfied)
    throw HypothesisError("dV/dt formula requires alpha/a = beta/b = gamma/c");
  return vdot_integral(u, p);
}

Coercivity coercivity_constant(const ParamSet& p) {
  Coercivity c;
  const double bp = std::max(p.b, 0.0);
  const double s1 = p.sigma1, s2 = p.sigma2;
  const double l2_coeff = std::abs(p.k) / 2.0 - bp * (s2 - s1) / ((s1 + 2.0) * s2);
  const double high_coeff = p.c / (s2 + 2.0) - bp * s1 / ((s1 + 2.0) * s2);
  c.M = std::min(p.a / 2.0, l2_coeff);
  c.valid = p.k < 0.0 && s1 < s2 && high_coeff >= 0.0 && c.M > 0.0;
  return c;
}

LyapunovReport verify_decay(const DiagnosticsLog& log, Functional which, double p) {
  LyapunovReport rep;
  rep.which = which;
  rep.p = p;
  if (which == Functional::Lp && log.lp_exponent != p)
    throw InputError("log records W_p for p = " + std::to_string(log.lp_exponent));

  const auto& s = log.samples;
  const std::size_t n = s.size();
  rep.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    rep.samples[i].t = s[i].t;
    rep.samples[i].Wp = s[i].wp;
    rep.samples[i].V = s[i].V;
    rep.samples[i].Vdot_formula = s[i].vdot;
  }
  std::vector<double> ts(n), vs(n);
  for (std::size_t i = 0; i < n; ++i) {
    ts[i] = s[i].t;
    vs[i] = s[i].V;
  }
  const auto dv = time_derivative(ts, vs);
  for (std::size_t i = 0; i < n; ++i) rep.samples[i].Vdot_numeric = dv[i];

  auto value = [&](std::size_t i) { return which == Functional::H1 ? s[i].V : s[i].wp; };
  for (std::size_t i = 1; i < n; ++i) {
    const double inc = value(i) - value(i - 1);
    rep.max_increase = std::max(rep.max_increase, inc);
    if (inc > 1e-8 * (1.0 + std::abs(value(i - 1)))) rep.monotone = false;
  }

  // Least-squares slope of ln F over the second half, positive values only.
  double st = 0, sy = 0, stt = 0, sty = 0;
  int m = 0;
  for (std::size_t i = n / 2; i < n; ++i) {
    const double f = value(i);
    if (!(f > 0.0)) continue;
    const double y = std::log(f);
    st += s[i].t;
    sy += y;
    stt += s[i].t * s[i].t;
    sty += s[i].t * y;
    ++m;
  }
  if (m >= 2) {
    const double den = m * stt - st * st;
    if (den > 0.0) rep.decay_rate_estimate = (m * sty - st * sy) / den;
  }
  return rep;
}

}  // namespace cgl
