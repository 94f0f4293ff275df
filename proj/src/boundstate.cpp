#include "cgl/boundstate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cgl/errors.hpp"
#include "cgl/params.hpp"

namespace cgl {

namespace {

constexpr double kPi = std::numbers::pi;

// |x|^s x without NaNs for negative x.
inline double signed_power(double x, double s) { return std::pow(std::abs(x), s) * x; }

// F(z)/z^2, which has the same positive roots as F and does not underflow.
double reduced_potential(double z, double eps, double eta1, double eta2, int chi, double s1,
                         double s2) {
  return -0.5 * eps + eta1 * std::pow(z, s1) / (s1 + 2.0) +
         chi * eta2 * std::pow(z, s2) / (s2 + 2.0);
}

struct HalfProfile {
  std::vector<double> psi;   // psi at x_i = i h, i = 0..n
  std::vector<double> dpsi;  // psi' at the same nodes
  bool overshoot = false;    // psi left the positive half-line
  bool passed_peak = false;  // psi' turned nonnegative before reaching x = 0
};

// RK4 from x = L down to x = 0 starting on the decaying branch of the zero
// level set of the first integral.
HalfProfile shoot(double log_delta, const Profile& pr, double L, int n) {
  const double eps = pr.eps, e1 = pr.eta1, e2 = pr.eta2, s1 = pr.sigma1, s2 = pr.sigma2;
  const int chi = pr.chi;
  auto force = [&](double y) {
    return eps * y - e1 * signed_power(y, s1) - chi * e2 * signed_power(y, s2);
  };
  HalfProfile out;
  out.psi.assign(n + 1, 0.0);
  out.dpsi.assign(n + 1, 0.0);
  const double delta = std::exp(log_delta);
  const double q = eps - 2.0 * e1 * std::pow(delta, s1) / (s1 + 2.0) -
                   2.0 * chi * e2 * std::pow(delta, s2) / (s2 + 2.0);
  double y = delta, v = -delta * std::sqrt(std::max(q, 0.0));
  out.psi[n] = y;
  out.dpsi[n] = v;
  const double h = -L / n;
  for (int i = n; i > 0; --i) {
    const double k1y = v, k1v = force(y);
    const double k2y = v + 0.5 * h * k1v, k2v = force(y + 0.5 * h * k1y);
    const double k3y = v + 0.5 * h * k2v, k3v = force(y + 0.5 * h * k2y);
    const double k4y = v + h * k3v, k4v = force(y + h * k3y);
    y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
    v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    if (!(y > 0.0) || !std::isfinite(v)) {
      out.overshoot = true;
      return out;
    }
    if (v > 0.0 && i > 1) out.passed_peak = true;
    out.psi[i - 1] = y;
    out.dpsi[i - 1] = v;
  }
  return out;
}

// +1 when the peak was passed before x = 0, -1 when it was not reached.
int shot_sign(const HalfProfile& hp) {
  if (hp.overshoot || hp.passed_peak) return 1;
  return hp.dpsi[0] > 0.0 ? 1 : -1;
}

HalfProfile solve_half(const Profile& pr, double L, int n) {
  const double root_eps = std::sqrt(pr.eps);
  double lo = std::log(2.0 * pr.x0) - root_eps * L - 10.0;
  double hi = std::log(pr.x0) - 1e-6;
  if (lo >= hi) lo = hi - 10.0;
  if (shot_sign(shoot(lo, pr, L, n)) != -1 || shot_sign(shoot(hi, pr, L, n)) != 1)
    throw NumericalError("profile shooting bracket failed; increase the half-width L");
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (shot_sign(shoot(mid, pr, L, n)) < 0)
      lo = mid;
    else
      hi = mid;
  }
  HalfProfile a = shoot(lo, pr, L, n);
  HalfProfile b = shoot(hi, pr, L, n);
  if (b.overshoot) return a;
  return std::abs(a.dpsi[0]) <= std::abs(b.dpsi[0]) ? a : b;
}

}  // namespace

void BoundStateSpec::validate() const {
  if (!std::isfinite(theta) || !std::isfinite(omega) || !std::isfinite(k) ||
      !std::isfinite(sigma1) || !std::isfinite(sigma2))
    throw InputError("bound-state parameters must be finite");
  if (!(std::abs(theta) < kPi / 2)) throw InputError("theta must lie in (-pi/2, pi/2)");
  if (!(sigma1 > 0.0) || !(sigma2 > 0.0)) throw InputError("sigma1, sigma2 must be positive");
  if (chi != 1 && chi != -1) throw InputError("chi must be +1 or -1");
  const double den = omega * std::cos(theta) + k * std::sin(theta);
  if (std::abs(den) <= 1e-14 * (std::abs(omega) + std::abs(k)) || den == 0.0)
    throw HypothesisError("omega cos(theta) + k sin(theta) must be nonzero");
}

double compute_d(const BoundStateSpec& spec) {
  spec.validate();
  const double ct = std::cos(spec.theta), st = std::sin(spec.theta);
  const double num = spec.k * ct - spec.omega * st + std::hypot(spec.omega, spec.k);
  const double den = spec.omega * ct + spec.k * st;
  return num / den;
}

double compute_gamma(double d, double theta, double sigma) {
  const double n = d * (sigma + 4.0);
  const double dd = sigma + 2.0 - 2.0 * d * d;
  return wrap_angle(theta + std::atan2(n, dd));
}

double eta_closed_form(double d, double sigma) {
  const double n = d * (sigma + 4.0);
  const double dd = sigma + 2.0 - 2.0 * d * d;
  return (sigma + 2.0) / std::hypot(n, dd);
}

double eta_from_angles(double d, double theta, double gamma) {
  return (d * std::sin(gamma - theta) + std::cos(gamma - theta)) / (1.0 + d * d);
}

NlsCoeffs compute_coeffs(const BoundStateSpec& spec) {
  NlsCoeffs c;
  c.d = compute_d(spec);
  c.gamma1 = compute_gamma(c.d, spec.theta, spec.sigma1);
  c.gamma2 = compute_gamma(c.d, spec.theta, spec.sigma2);
  c.epsilon = std::hypot(spec.omega, spec.k) / (1.0 + c.d * c.d);
  c.eta1 = eta_closed_form(c.d, spec.sigma1);
  c.eta2 = eta_closed_form(c.d, spec.sigma2);
  c.eta_crosscheck = std::max(std::abs(c.eta1 - eta_from_angles(c.d, spec.theta, c.gamma1)),
                              std::abs(c.eta2 - eta_from_angles(c.d, spec.theta, c.gamma2)));
  return c;
}

double nls_potential(double z, double eps, double eta1, double eta2, int chi, double s1,
                     double s2) {
  return z * z * reduced_potential(z, eps, eta1, eta2, chi, s1, s2);
}

std::optional<double> first_positive_root(double eps, double eta1, double eta2, int chi,
                                          double s1, double s2) {
  auto g = [&](double z) { return reduced_potential(z, eps, eta1, eta2, chi, s1, s2); };
  double z_prev = 1e-8;
  if (!(g(z_prev) < 0.0)) return std::nullopt;
  for (double z = z_prev * 1.01; z < 1e8; z *= 1.01) {
    if (g(z) >= 0.0) {
      double lo = z_prev, hi = z;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (g(mid) < 0.0 ? lo : hi) = mid;
      }
      return std::abs(g(lo)) <= std::abs(g(hi)) ? lo : hi;
    }
    z_prev = z;
  }
  return std::nullopt;
}

Admissibility admissibility_chi_minus(double eps, double eta1, double eta2, double s1, double s2) {
  Admissibility a;
  const auto z0 = first_positive_root(eps, eta1, eta2, -1, s1, s2);
  if (!z0) {
    a.note = "F has no positive root";
    return a;
  }
  a.root_found = true;
  a.z0 = *z0;
  a.value = s1 * eta1 * std::pow(a.z0, s1) / (s1 + 2.0) - s2 * eta2 * std::pow(a.z0, s2) / (s2 + 2.0);
  a.admissible = a.value > 0.0;
  if (!a.admissible) a.note = "f(z0) <= 0 at the first root of F";
  return a;
}

Admissibility admissibility_chi_minus(const NlsCoeffs& c, double s1, double s2) {
  return admissibility_chi_minus(c.epsilon, c.eta1, c.eta2, s1, s2);
}

double default_half_width(double eps) { return std::max(20.0, 25.0 / std::sqrt(eps)); }

Profile solve_profile(const NlsCoeffs& coeffs, int chi, double sigma1, double sigma2, double L,
                      int n) {
  if (chi != 1 && chi != -1) throw InputError("chi must be +1 or -1");
  if (!(coeffs.epsilon > 0.0) || !(coeffs.eta1 > 0.0) || !(coeffs.eta2 >= 0.0))
    throw HypothesisError("profile needs eps > 0, eta1 > 0, eta2 >= 0");
  if (!(sigma1 > 0.0) || !(sigma2 > 0.0)) throw InputError("sigma1, sigma2 must be positive");
  if (!(L > 0.0)) throw InputError("half-width L must be positive");
  if (n < 4) throw InputError("profile needs at least 4 steps");

  Profile pr{Grid::interval(-L, L, 2 * n + 1), {}, {}, 0.0, L, n};
  pr.eps = coeffs.epsilon;
  pr.eta1 = coeffs.eta1;
  pr.eta2 = coeffs.eta2;
  pr.chi = chi;
  pr.sigma1 = sigma1;
  pr.sigma2 = sigma2;

  const auto x0 = first_positive_root(pr.eps, pr.eta1, pr.eta2, chi, sigma1, sigma2);
  if (!x0) throw HypothesisError("F has no positive root; no homoclinic profile exists");
  pr.x0 = *x0;
  if (chi == -1) {
    const auto adm = admissibility_chi_minus(pr.eps, pr.eta1, pr.eta2, sigma1, sigma2);
    if (!adm.admissible) throw HypothesisError("chi = -1 profile is not admissible: " + adm.note);
  }

  const HalfProfile coarse = solve_half(pr, L, n);
  const HalfProfile fine = solve_half(pr, L, 2 * n);
  double scale = 0.0, diff = 0.0;
  for (int i = 0; i <= n; ++i) {
    scale = std::max(scale, coarse.psi[i]);
    diff = std::max(diff, std::abs(coarse.psi[i] - fine.psi[2 * i]));
  }
  pr.richardson_error = diff;
  if (diff > 1e-6 * scale)
    throw NumericalError("profile step-halving check failed: discrepancy " + std::to_string(diff));

  pr.psi.assign(2 * n + 1, 0.0);
  pr.dpsi.assign(2 * n + 1, 0.0);
  for (int i = 0; i <= n; ++i) {
    pr.psi[n + i] = pr.psi[n - i] = coarse.psi[i];
    pr.dpsi[n + i] = coarse.dpsi[i];
    pr.dpsi[n - i] = -coarse.dpsi[i];
  }
  pr.dpsi[n] = coarse.dpsi[0];
  pr.peak_error = std::abs(pr.psi[n] - pr.x0);
  return pr;
}

std::vector<double> first_integral(const Profile& p) {
  std::vector<double> h(p.psi.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double y = p.psi[i], v = p.dpsi[i];
    h[i] = v * v - p.eps * y * y + 2.0 * p.eta1 * std::pow(y, p.sigma1 + 2.0) / (p.sigma1 + 2.0) +
           2.0 * p.chi * p.eta2 * std::pow(y, p.sigma2 + 2.0) / (p.sigma2 + 2.0);
  }
  return h;
}

double tail_decay_rate(const Profile& p) {
  const std::size_t last = p.psi.size() - 1;
  const double end_val = p.psi[last];
  std::size_t start = last;
  while (start > p.psi.size() / 2 && p.psi[start] < 10.0 * end_val) --start;
  if (start == last) return 0.0;
  return (std::log(end_val) - std::log(p.psi[start])) / (p.grid.x(static_cast<int>(last)) -
                                                         p.grid.x(static_cast<int>(start)));
}

BoundState assemble(const Profile& profile, const NlsCoeffs& coeffs) {
  BoundState bs{profile.grid, std::vector<cplx>(profile.psi.size()), coeffs};
  for (std::size_t i = 0; i < profile.psi.size(); ++i) {
    const double y = profile.psi[i];
    bs.phi[i] = y < 1e-300 ? cplx(0.0) : y * std::exp(cplx(0.0, coeffs.d * std::log(y)));
  }
  return bs;
}

double residual_bs(const BoundState& bs, const BoundStateSpec& spec) {
  const Grid& g = bs.grid;
  if (bs.phi.size() != g.size()) throw ShapeError("bound state does not match its grid");
  const int n = g.nx();
  const double h = g.hx();
  const cplx e_theta = std::polar(1.0, spec.theta);
  const cplx e_g1 = std::polar(1.0, bs.coeffs.gamma1);
  const cplx e_g2 = static_cast<double>(spec.chi) * std::polar(1.0, bs.coeffs.gamma2);
  const cplx lin(spec.k, -spec.omega);
  double sum = 0.0;
  for (int i = 1; i + 1 < n; ++i) {
    const cplx f = bs.phi[i];
    const double m = std::abs(f);
    const cplx d2 = (bs.phi[i + 1] - 2.0 * f + bs.phi[i - 1]) / (h * h);
    const cplx r = e_theta * d2 + e_g1 * std::pow(m, spec.sigma1) * f +
                   e_g2 * std::pow(m, spec.sigma2) * f + lin * f;
    sum += h * std::norm(r);
  }
  return std::sqrt(sum);
}

}  // namespace cgl
