#include "cgl/params.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "cgl/discretization.hpp"
#include "cgl/errors.hpp"

namespace cgl {

namespace {

constexpr double kPi = std::numbers::pi;

bool finite_all(std::initializer_list<double> xs) {
  for (double x : xs)
    if (!std::isfinite(x)) return false;
  return true;
}

bool approx_equal(double x, double y, double rel_tol) {
  return std::abs(x - y) <= rel_tol * std::max({1.0, std::abs(x), std::abs(y)});
}

double positive_part(double x) { return x > 0.0 ? x : 0.0; }

// Largest sigma allowed by the local theory: 2/(N-2)^+, infinite for N <= 2.
double sobolev_exponent_bound(int dimension) {
  if (dimension <= 2) return std::numeric_limits<double>::infinity();
  return 2.0 / (dimension - 2);
}

void finish(BranchReport& r) {
  r.satisfied = true;
  for (const auto& c : r.conditions) r.satisfied = r.satisfied && c.satisfied;
}

}  // namespace

void ParamSet::validate() const {
  if (!finite_all({a, alpha, b, beta, c, gamma, k, sigma1, sigma2}))
    throw InputError("parameters must be finite");
  if (!(a > 0.0)) throw InputError("diffusion coefficient a must be positive");
  if (!(sigma1 > 0.0)) throw InputError("sigma1 must be positive");
  if (!(sigma2 > 0.0)) throw InputError("sigma2 must be positive");
}

void TrigParamSet::validate() const {
  if (!finite_all({theta, gamma1, gamma2, k, sigma1, sigma2}))
    throw InputError("parameters must be finite");
  if (!(std::abs(theta) < kPi / 2)) throw InputError("theta must lie in (-pi/2, pi/2)");
  if (!(gamma1 > -kPi && gamma1 <= kPi)) throw InputError("gamma1 must lie in (-pi, pi]");
  if (!(gamma2 > -kPi && gamma2 <= kPi)) throw InputError("gamma2 must lie in (-pi, pi]");
  if (chi != 1 && chi != -1) throw InputError("chi must be +1 or -1");
  if (!(sigma1 > 0.0) || !(sigma2 > 0.0)) throw InputError("sigma1, sigma2 must be positive");
}

double wrap_angle(double angle) {
  double w = std::remainder(angle, 2.0 * kPi);  // in [-pi, pi]
  if (w <= -kPi) w += 2.0 * kPi;
  return w;
}

TrigForm to_trig_form(const ParamSet& p) {
  p.validate();
  const std::complex<double> lin(p.a, p.alpha), foc(p.b, p.beta), damp(p.c, p.gamma);
  if (std::abs(foc) == 0.0)
    throw HypothesisError("trigonometric form undefined: (b, beta) = (0, 0)");
  if (std::abs(damp) == 0.0)
    throw HypothesisError("trigonometric form undefined: (c, gamma) = (0, 0)");

  TrigForm out;
  out.trig.theta = std::arg(lin);
  out.trig.gamma1 = wrap_angle(std::arg(foc));
  // chi e^{i gamma2} = -(c + i gamma)/|c + i gamma|. Prefer chi = -1 with gamma2 = arg(c + i gamma)
  // so that the all-real damping case c > 0 reads (chi, gamma2) = (-1, 0).
  out.trig.chi = -1;
  out.trig.gamma2 = wrap_angle(std::arg(damp));
  out.trig.k = p.k;
  out.trig.sigma1 = p.sigma1;
  out.trig.sigma2 = p.sigma2;
  out.moduli = {std::abs(lin), std::abs(foc), std::abs(damp)};
  out.exact_equivalence = out.moduli[0] == 1.0 && out.moduli[1] == 1.0 && out.moduli[2] == 1.0;
  return out;
}

ParamSet from_trig_form(const TrigParamSet& t, const std::array<double, 3>& moduli) {
  const auto lin = std::polar(moduli[0], t.theta);
  const auto foc = std::polar(moduli[1], t.gamma1);
  const auto damp = -static_cast<double>(t.chi) * std::polar(moduli[2], t.gamma2);
  ParamSet p;
  p.a = lin.real();
  p.alpha = lin.imag();
  p.b = foc.real();
  p.beta = foc.imag();
  p.c = damp.real();
  p.gamma = damp.imag();
  p.k = t.k;
  p.sigma1 = t.sigma1;
  p.sigma2 = t.sigma2;
  return p;
}

// ---------------------------------------------------------------------------

std::string to_string(Relation r) {
  switch (r) {
    case Relation::Less: return "<";
    case Relation::LessEqual: return "<=";
    case Relation::Greater: return ">";
    case Relation::GreaterEqual: return ">=";
    case Relation::Equal: return "==";
    case Relation::NotEqual: return "!=";
    case Relation::ApproxEqual: return "~=";
  }
  return "?";
}

std::string to_string(PeriodicCase c) {
  switch (c) {
    case PeriodicCase::Case1_c0: return "Case1_c0";
    case PeriodicCase::Case2_k0: return "Case2_k0";
    case PeriodicCase::None: return "None";
  }
  return "None";
}

Condition make_condition(std::string name, double lhs, Relation rel, double rhs, double rel_tol) {
  Condition c{std::move(name), lhs, rhs, rel, false, false};
  switch (rel) {
    case Relation::Less: c.satisfied = lhs < rhs; break;
    case Relation::LessEqual: c.satisfied = lhs <= rhs; break;
    case Relation::Greater: c.satisfied = lhs > rhs; break;
    case Relation::GreaterEqual: c.satisfied = lhs >= rhs; break;
    case Relation::Equal: c.satisfied = lhs == rhs; break;
    case Relation::NotEqual: c.satisfied = lhs != rhs && !std::isnan(lhs); break;
    case Relation::ApproxEqual: c.satisfied = approx_equal(lhs, rhs, rel_tol); break;
  }
  if (rel == Relation::LessEqual || rel == Relation::GreaterEqual) c.on_boundary = lhs == rhs;
  return c;
}

const Condition* BranchReport::find(const std::string& name) const {
  for (const auto& c : conditions)
    if (c.name == name) return &c;
  return nullptr;
}

double unit_ball_volume(int dimension) {
  if (dimension < 1) throw InputError("dimension must be >= 1");
  const double n = dimension;
  return std::pow(kPi, n / 2.0) / std::tgamma(n / 2.0 + 1.0);
}

double poincare_factor(double domain_volume, int dimension) {
  if (!(domain_volume > 0.0)) throw InputError("domain volume must be positive");
  return std::pow(domain_volume / unit_ball_volume(dimension), -2.0 / dimension);
}

BranchReport proportionality(const ParamSet& p, double rel_tol) {
  BranchReport r;
  const double base = p.alpha / p.a;
  if (p.b != 0.0)
    r.conditions.push_back(
        make_condition("beta/b == alpha/a", p.beta / p.b, Relation::ApproxEqual, base, rel_tol));
  else
    r.note += "b = 0: beta/b ratio dropped. ";
  if (p.c != 0.0)
    r.conditions.push_back(
        make_condition("gamma/c == alpha/a", p.gamma / p.c, Relation::ApproxEqual, base, rel_tol));
  else
    r.note += "c = 0: gamma/c ratio dropped. ";
  finish(r);
  return r;
}

RegimeReport classify(const ParamSet& p, const ClassifyOptions& opts) {
  p.validate();
  if (opts.dimension < 1) throw InputError("dimension must be >= 1");
  const bool bounded = opts.bounded_domain.value_or(opts.domain_volume.has_value());
  if (bounded && !opts.domain_volume)
    throw InputError("bounded-domain branches requested but domain_volume is missing");
  if (opts.domain_volume && !(*opts.domain_volume > 0.0))
    throw InputError("domain_volume must be positive");

  const int n = opts.dimension;
  const double pexp = opts.lp_exponent;
  const double s1 = p.sigma1, s2 = p.sigma2;
  const double sob = sobolev_exponent_bound(n);

  RegimeReport rep;
  rep.lp_exponent = pexp;
  rep.dimension = n;
  rep.domain_volume = opts.domain_volume;

  auto local_theory = [&](BranchReport& r) {
    r.conditions.push_back(make_condition("sigma1 <= 2/(N-2)+", s1, Relation::LessEqual, sob));
    r.conditions.push_back(make_condition("sigma2 <= 2/(N-2)+", s2, Relation::LessEqual, sob));
  };

  // Global existence.
  {
    auto& r = rep.global_existence;
    local_theory(r);
    r.conditions.push_back(make_condition("sigma1 < sigma2", s1, Relation::Less, s2));
    r.conditions.push_back(make_condition("c > 0", p.c, Relation::Greater, 0.0));
    r.conditions.push_back(make_condition("alpha != 0", p.alpha, Relation::NotEqual, 0.0));
    const double ratio = p.alpha != 0.0 ? p.gamma / p.alpha : std::numeric_limits<double>::quiet_NaN();
    r.conditions.push_back(make_condition("gamma/alpha >= 0", ratio, Relation::GreaterEqual, 0.0));
    finish(r);
  }

  const double bs = p.b * s1 / s2;
  const double bgap = p.b * (s2 - s1) / s2;
  const double absk = std::abs(p.k);

  auto common_lp = [&](BranchReport& r) {
    local_theory(r);
    r.conditions.push_back(make_condition("sigma1 < sigma2", s1, Relation::Less, s2));
    r.conditions.push_back(make_condition("p >= 2", pexp, Relation::GreaterEqual, 2.0));
    if (n > 2)
      r.conditions.push_back(
          make_condition("p <= 2N/(N-2)", pexp, Relation::LessEqual, 2.0 * n / (n - 2.0)));
    else
      r.conditions.push_back(make_condition("p < inf", pexp, Relation::Less,
                                            std::numeric_limits<double>::infinity()));
  };

  // L^p stability.
  {
    auto& r = rep.lp_stable;
    common_lp(r);
    r.conditions.push_back(make_condition("k <= 0", p.k, Relation::LessEqual, 0.0));
    r.conditions.push_back(
        make_condition("|alpha|(p-2)/2 <= a", std::abs(p.alpha) * (pexp - 2.0) / 2.0,
                       Relation::LessEqual, p.a));
    r.conditions.push_back(make_condition("b sigma1/sigma2 <= c", bs, Relation::LessEqual, p.c));
    r.conditions.push_back(
        make_condition("b (sigma2-sigma1)/sigma2 <= |k|", bgap, Relation::LessEqual, absk));
    finish(r);
  }
  {
    auto& r = rep.lp_asymptotically_stable;
    common_lp(r);
    r.conditions.push_back(make_condition("k < 0", p.k, Relation::Less, 0.0));
    r.conditions.push_back(
        make_condition("|alpha|(p-2)/2 <= a", std::abs(p.alpha) * (pexp - 2.0) / 2.0,
                       Relation::LessEqual, p.a));
    r.conditions.push_back(make_condition("b sigma1/sigma2 <= c", bs, Relation::LessEqual, p.c));
    r.conditions.push_back(
        make_condition("b (sigma2-sigma1)/sigma2 < |k|", bgap, Relation::Less, absk));
    finish(r);
  }

  // p = 2 on a bounded domain with k > 0.
  {
    auto& r = rep.l2_bounded_domain;
    if (!bounded) {
      r.evaluated = false;
      r.note = "bounded-domain branch not requested";
    } else {
      const double pf = poincare_factor(*opts.domain_volume, n);
      local_theory(r);
      r.conditions.push_back(make_condition("sigma1 < sigma2", s1, Relation::Less, s2));
      r.conditions.push_back(make_condition("p == 2", pexp, Relation::Equal, 2.0));
      r.conditions.push_back(make_condition("k > 0", p.k, Relation::Greater, 0.0));
      r.conditions.push_back(make_condition("b sigma1/sigma2 <= c", bs, Relation::LessEqual, p.c));
      r.conditions.push_back(make_condition("b+ (sigma2-sigma1)/sigma2 + k < a (|Omega|/omega_N)^(-2/N)",
                                            positive_part(p.b) * (s2 - s1) / s2 + p.k,
                                            Relation::Less, p.a * pf));
      finish(r);
    }
  }

  // H^1 stability.
  const BranchReport prop = proportionality(p);
  const double lhs_interp = p.b / (s1 + 2.0) * s1 / s2;
  const double rhs_interp = p.c / (s2 + 2.0);
  auto add_prop = [&](BranchReport& r) {
    for (const auto& c : prop.conditions) r.conditions.push_back(c);
    r.note = prop.note;
  };
  {
    auto& r = rep.h1_k_negative;
    local_theory(r);
    r.conditions.push_back(make_condition("sigma1 < sigma2", s1, Relation::Less, s2));
    add_prop(r);
    r.conditions.push_back(make_condition("k < 0", p.k, Relation::Less, 0.0));
    r.conditions.push_back(make_condition("b sigma1/((sigma1+2) sigma2) <= c/(sigma2+2)",
                                          lhs_interp, Relation::LessEqual, rhs_interp));
    r.conditions.push_back(
        make_condition("b (sigma2-sigma1)/sigma2 <= |k|/2", bgap, Relation::LessEqual, absk / 2.0));
    r.conditions.push_back(make_condition("b (sigma1+1) < min(c, |k|)", p.b * (s1 + 1.0),
                                          Relation::Less, std::min(p.c, absk)));
    finish(r);
  }
  {
    auto& r = rep.h1_k_zero_bounded;
    if (!bounded) {
      r.evaluated = false;
      r.note = "bounded-domain branch not requested";
    } else {
      const double pf = poincare_factor(*opts.domain_volume, n);
      local_theory(r);
      r.conditions.push_back(make_condition("sigma1 < sigma2", s1, Relation::Less, s2));
      add_prop(r);
      r.conditions.push_back(make_condition("k == 0", p.k, Relation::Equal, 0.0));
      r.conditions.push_back(make_condition("b sigma1/((sigma1+2) sigma2) <= c/(sigma2+2)",
                                            lhs_interp, Relation::LessEqual, rhs_interp));
      r.conditions.push_back(make_condition("b (sigma1+1) < min(c, (|Omega|/omega_N)^(-2/N))",
                                            p.b * (s1 + 1.0), Relation::Less, std::min(p.c, pf)));
      finish(r);
    }
  }

  // Energy blow-up criterion: the equation must have the shape
  // e^{i theta}[Lap u + |u|^s1 u - nu |u|^s2 u] + k u up to rescaling of u and t.
  {
    auto& r = rep.blow_up_admissible;
    const std::complex<double> lin(p.a, p.alpha), foc(p.b, p.beta), damp(p.c, p.gamma);
    const std::complex<double> s = foc / lin;
    const std::complex<double> nu = damp / lin;
    r.conditions.push_back(
        make_condition("Im[(b+i beta)/(a+i alpha)] == 0", s.imag(), Relation::ApproxEqual, 0.0));
    r.conditions.push_back(
        make_condition("Re[(b+i beta)/(a+i alpha)] > 0", s.real(), Relation::Greater, 0.0));
    r.conditions.push_back(
        make_condition("Im[(c+i gamma)/(a+i alpha)] == 0", nu.imag(), Relation::ApproxEqual, 0.0));
    r.conditions.push_back(make_condition("k >= 0", p.k, Relation::GreaterEqual, 0.0));
    // The disjunction is reported through whichever half decides it.
    if (nu.real() <= 0.0 || s2 > s1)
      r.conditions.push_back(make_condition("nu <= 0", nu.real(), Relation::LessEqual, 0.0));
    else
      r.conditions.push_back(make_condition("sigma2 <= sigma1", s2, Relation::LessEqual, s1));
    finish(r);
    r.note = "nu = " + std::to_string(nu.real());
  }

  // Spatially homogeneous periodic orbits.
  {
    auto& r = rep.periodic_orbit;
    r.conditions.push_back(make_condition("sigma1 < sigma2", s1, Relation::Less, s2));
    if (p.c == 0.0) {
      r.conditions.push_back(make_condition("c == 0", p.c, Relation::Equal, 0.0));
      r.conditions.push_back(make_condition("b k < 0", p.b * p.k, Relation::Less, 0.0));
      finish(r);
      if (r.satisfied) rep.periodic_orbit_case = PeriodicCase::Case1_c0;
    } else if (p.k == 0.0) {
      r.conditions.push_back(make_condition("k == 0", p.k, Relation::Equal, 0.0));
      r.conditions.push_back(make_condition("b c > 0", p.b * p.c, Relation::Greater, 0.0));
      finish(r);
      if (r.satisfied) rep.periodic_orbit_case = PeriodicCase::Case2_k0;
    } else {
      r.conditions.push_back(make_condition("c == 0", p.c, Relation::Equal, 0.0));
      r.conditions.push_back(make_condition("k == 0", p.k, Relation::Equal, 0.0));
      finish(r);
    }
  }

  return rep;
}

// ---------------------------------------------------------------------------

BlowupEnergy blowup_energy(const Field& u0, double theta, double nu, double sigma1,
                           double sigma2, double k) {
  if (u0.bc() != Boundary::Dirichlet) throw InputError("blow-up energy requires a Dirichlet field");
  if (!(std::abs(theta) < kPi / 2)) throw InputError("theta must lie in (-pi/2, pi/2)");
  if (!(sigma1 > 0.0) || !(sigma2 > 0.0)) throw InputError("sigma1, sigma2 must be positive");
  BlowupEnergy e;
  e.energy = 0.5 * grad_sq(u0) - lp_power(u0, sigma1 + 2.0) / (sigma1 + 2.0) +
             nu * lp_power(u0, sigma2 + 2.0) / (sigma2 + 2.0);
  e.hypotheses_hold = k >= 0.0 && (nu <= 0.0 || sigma2 <= sigma1);
  return e;
}

ParamSet blowup_params(double theta, double nu, double sigma1, double sigma2, double k) {
  ParamSet p;
  p.a = std::cos(theta);
  p.alpha = std::sin(theta);
  p.b = p.a;
  p.beta = p.alpha;
  p.c = nu * p.a;
  p.gamma = nu * p.alpha;
  p.k = k;
  p.sigma1 = sigma1;
  p.sigma2 = sigma2;
  p.validate();
  return p;
}

std::optional<OrbitParams> periodic_orbit_params(const ParamSet& p) {
  p.validate();
  OrbitParams o;
  if (p.c == 0.0 && p.b * p.k < 0.0) {
    o.which = PeriodicCase::Case1_c0;
    o.r0 = std::pow(-p.k / p.b, 1.0 / p.sigma1);
  } else if (p.k == 0.0 && p.b * p.c > 0.0 && p.sigma1 != p.sigma2) {
    o.which = PeriodicCase::Case2_k0;
    o.r0 = std::pow(p.b / p.c, 1.0 / (p.sigma2 - p.sigma1));
  } else {
    return std::nullopt;
  }
  o.freq = p.beta * std::pow(o.r0, p.sigma1) - p.gamma * std::pow(o.r0, p.sigma2);
  o.degenerate = o.freq == 0.0;
  o.period = o.degenerate ? std::numeric_limits<double>::infinity() : 2.0 * kPi / std::abs(o.freq);
  return o;
}

}  // namespace cgl
