#include "cgl/evolution.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

#include "cgl/errors.hpp"
#include "cgl/stability.hpp"

namespace cgl {

namespace {

constexpr double kPi = std::numbers::pi;

// The FFTW planner is not reentrant; execution of an existing plan is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

// Tridiagonal complex system, solved by the Thomas algorithm.
struct Tridiag {
  std::vector<cplx> lo, di, up;

  void solve(std::vector<cplx>& rhs, std::vector<cplx>& scratch) const {
    const std::size_t m = di.size();
    scratch.resize(m);
    cplx beta = di[0];
    rhs[0] /= beta;
    for (std::size_t i = 1; i < m; ++i) {
      scratch[i] = up[i - 1] / beta;
      beta = di[i] - lo[i] * scratch[i];
      rhs[i] = (rhs[i] - lo[i] * rhs[i - 1]) / beta;
    }
    for (std::size_t i = m - 1; i-- > 0;) rhs[i] -= scratch[i + 1] * rhs[i + 1];
  }
};

// Second-difference matrix along one line of m unknowns, scaled by coef:
// Dirichlet lines hold interior nodes only, Neumann lines use ghost reflection.
Tridiag identity_plus(std::size_t m, cplx coef, double h, Boundary bc) {
  Tridiag t;
  t.lo.assign(m, 0.0);
  t.di.assign(m, 0.0);
  t.up.assign(m, 0.0);
  const cplx c = coef / (h * h);
  for (std::size_t i = 0; i < m; ++i) {
    t.di[i] = 1.0 - 2.0 * c;
    if (i > 0) t.lo[i] = c;
    if (i + 1 < m) t.up[i] = c;
  }
  if (bc == Boundary::Neumann && m >= 2) {
    t.up[0] = 2.0 * c;
    t.lo[m - 1] = 2.0 * c;
  }
  return t;
}

void apply(const Tridiag& t, const std::vector<cplx>& x, std::vector<cplx>& y) {
  const std::size_t m = x.size();
  y.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    cplx v = t.di[i] * x[i];
    if (i > 0) v += t.lo[i] * x[i - 1];
    if (i + 1 < m) v += t.up[i] * x[i + 1];
    y[i] = v;
  }
}

}  // namespace

std::string to_string(Scheme s) {
  return s == Scheme::EigenbasisExponential ? "eigenbasis" : "semi-implicit-fd";
}

Scheme scheme_from_string(const std::string& s) {
  if (s == "eigenbasis" || s == "EigenbasisExponential") return Scheme::EigenbasisExponential;
  if (s == "semi-implicit-fd" || s == "fd" || s == "SemiImplicitFD") return Scheme::SemiImplicitFD;
  throw InputError("unknown scheme '" + s + "'");
}

std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::Completed: return "Completed";
    case Outcome::BlowUp: return "BlowUp";
    case Outcome::Failed: return "Failed";
  }
  return "Failed";
}

double default_dt(const Grid& g, const ParamSet& p, Scheme s) {
  if (s == Scheme::EigenbasisExponential) return 1e-3;
  const double h = g.dim() == 2 ? std::min(g.hx(), g.hy()) : g.hx();
  return 0.25 * h * h / p.a;
}

std::vector<std::string> DiagnosticsLog::columns() {
  return {"t", "l2_sq", "grad_sq", "lp_sigma1", "lp_sigma2", "sup", "V", "mass_residual", "Wp",
          "Vdot"};
}

std::vector<double> time_derivative(const std::vector<double>& t, const std::vector<double>& y) {
  const std::size_t n = t.size();
  std::vector<double> d(n, 0.0);
  if (n == 2) {
    d[0] = d[1] = (y[1] - y[0]) / (t[1] - t[0]);
    return d;
  }
  for (std::size_t i = 0; i < n && n >= 3; ++i) {
    const std::size_t j = i == 0 ? 1 : (i == n - 1 ? n - 2 : i);
    const double t0 = t[j - 1], t1 = t[j], t2 = t[j + 1], x = t[i];
    const double l0 = (2 * x - t1 - t2) / ((t0 - t1) * (t0 - t2));
    const double l1 = (2 * x - t0 - t2) / ((t1 - t0) * (t1 - t2));
    const double l2 = (2 * x - t0 - t1) / ((t2 - t0) * (t2 - t1));
    d[i] = l0 * y[j - 1] + l1 * y[j] + l2 * y[j + 1];
  }
  return d;
}

DiagnosticsSample sample_diagnostics(const Field& u, const ParamSet& p, double t, double lp_exponent) {
  DiagnosticsSample s;
  s.t = t;
  s.l2sq = lp_power(u, 2.0);
  s.gradsq = grad_sq(u);
  s.lp1 = lp_power(u, p.sigma1 + 2.0);
  s.lp2 = lp_power(u, p.sigma2 + 2.0);
  s.sup = sup_norm(u);
  s.V = 0.5 * p.a * s.gradsq - p.b * s.lp1 / (p.sigma1 + 2.0) + p.c * s.lp2 / (p.sigma2 + 2.0) -
        0.5 * p.k * s.l2sq;
  s.wp = lp_exponent == 2.0 ? s.l2sq : lp_power(u, lp_exponent);
  if (proportionality(p).satisfied) s.vdot = vdot_integral(u, p);
  return s;
}

void fill_mass_residual(DiagnosticsLog& log, const ParamSet& p) {
  auto& s = log.samples;
  if (s.size() < 2) return;
  std::vector<double> t(s.size()), m(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    t[i] = s[i].t;
    m[i] = 0.5 * s[i].l2sq;
  }
  const auto dm = time_derivative(t, m);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double rhs = -p.a * s[i].gradsq + p.b * s[i].lp1 - p.c * s[i].lp2 + p.k * s[i].l2sq;
    s[i].mass_residual = std::abs(dm[i] - rhs);
  }
}

// ---------------------------------------------------------------------------
// Stepper

struct Stepper::Impl {
  Grid grid;
  Boundary bc;
  ParamSet p;
  Scheme scheme;

  // Eigenbasis scheme: r2r transform of the unknown block.
  int mx = 0, my = 1;
  std::vector<cplx> buf;
  std::vector<double> mu;
  double norm = 1.0;
  fftw_plan plan = nullptr;
  double cached_tau = std::numeric_limits<double>::quiet_NaN();
  std::vector<cplx> mult;

  // Finite-difference scheme: Crank-Nicolson (1-D) or Peaceman-Rachford (2-D).
  double cached_fd_tau = std::numeric_limits<double>::quiet_NaN();
  Tridiag impl_x, expl_x, impl_y, expl_y;
  std::vector<cplx> line, line_out, scratch;

  Impl(const Grid& g, Boundary b, const ParamSet& prm, Scheme s)
      : grid(g), bc(b), p(prm), scheme(s) {
    if (scheme != Scheme::EigenbasisExponential) return;
    const bool dir = bc == Boundary::Dirichlet;
    mx = dir ? grid.nx() - 2 : grid.nx();
    my = grid.dim() == 2 ? (dir ? grid.ny() - 2 : grid.ny()) : 1;
    buf.assign(static_cast<std::size_t>(mx) * my, 0.0);
    mu.resize(buf.size());
    for (int j = 0; j < my; ++j)
      for (int i = 0; i < mx; ++i) {
        const int kx = dir ? i + 1 : i;
        double m = mode_eigenvalue_1d(kx, grid.lx());
        if (grid.dim() == 2) m += mode_eigenvalue_1d(dir ? j + 1 : j, grid.ly());
        mu[static_cast<std::size_t>(j) * mx + i] = m;
      }
    const fftw_r2r_kind kind = dir ? FFTW_RODFT00 : FFTW_REDFT00;
    auto logical = [&](int m) { return dir ? 2.0 * (m + 1) : 2.0 * (m - 1); };
    norm = logical(mx) * (grid.dim() == 2 ? logical(my) : 1.0);
    auto* data = reinterpret_cast<double*>(buf.data());
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    if (grid.dim() == 1) {
      int n[1] = {mx};
      fftw_r2r_kind kinds[1] = {kind};
      plan = fftw_plan_many_r2r(1, n, 2, data, nullptr, 2, 1, data, nullptr, 2, 1, kinds,
                                FFTW_ESTIMATE);
    } else {
      int n[2] = {my, mx};
      fftw_r2r_kind kinds[2] = {kind, kind};
      plan = fftw_plan_many_r2r(2, n, 2, data, nullptr, 2, 1, data, nullptr, 2, 1, kinds,
                                FFTW_ESTIMATE);
    }
    if (!plan) throw NumericalError("FFTW planning failed");
  }

  ~Impl() {
    if (plan) {
      std::lock_guard<std::mutex> lock(fftw_planner_mutex());
      fftw_destroy_plan(plan);
    }
  }

  void linear_eigen(Field& u, double tau) {
    if (tau != cached_tau) {
      const cplx lam(p.a, p.alpha);
      mult.resize(mu.size());
      for (std::size_t i = 0; i < mu.size(); ++i) mult[i] = std::exp(-tau * lam * mu[i]) / norm;
      cached_tau = tau;
    }
    const int off = bc == Boundary::Dirichlet ? 1 : 0;
    for (int j = 0; j < my; ++j)
      for (int i = 0; i < mx; ++i)
        buf[static_cast<std::size_t>(j) * mx + i] = u.at(i + off, grid.dim() == 2 ? j + off : 0);
    auto* data = reinterpret_cast<double*>(buf.data());
    fftw_execute_r2r(plan, data, data);
    for (std::size_t i = 0; i < buf.size(); ++i) buf[i] *= mult[i];
    fftw_execute_r2r(plan, data, data);
    for (int j = 0; j < my; ++j)
      for (int i = 0; i < mx; ++i)
        u.at(i + off, grid.dim() == 2 ? j + off : 0) = buf[static_cast<std::size_t>(j) * mx + i];
  }

  void prepare_fd(double tau) {
    if (tau == cached_fd_tau) return;
    const cplx lam(p.a, p.alpha);
    const bool dir = bc == Boundary::Dirichlet;
    const std::size_t mxl = dir ? grid.nx() - 2 : grid.nx();
    impl_x = identity_plus(mxl, -0.5 * tau * lam, grid.hx(), bc);
    expl_x = identity_plus(mxl, 0.5 * tau * lam, grid.hx(), bc);
    if (grid.dim() == 2) {
      const std::size_t myl = dir ? grid.ny() - 2 : grid.ny();
      impl_y = identity_plus(myl, -0.5 * tau * lam, grid.hy(), bc);
      expl_y = identity_plus(myl, 0.5 * tau * lam, grid.hy(), bc);
    }
    cached_fd_tau = tau;
  }

  // Gathers the unknowns of row j (fixed y) or column i (fixed x).
  void gather_row(const Field& u, int j, std::vector<cplx>& out) const {
    const int off = bc == Boundary::Dirichlet ? 1 : 0;
    out.resize(grid.nx() - 2 * off);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = u.at(static_cast<int>(i) + off, j);
  }
  void scatter_row(Field& u, int j, const std::vector<cplx>& in) const {
    const int off = bc == Boundary::Dirichlet ? 1 : 0;
    for (std::size_t i = 0; i < in.size(); ++i) u.at(static_cast<int>(i) + off, j) = in[i];
  }
  void gather_col(const Field& u, int i, std::vector<cplx>& out) const {
    const int off = bc == Boundary::Dirichlet ? 1 : 0;
    out.resize(grid.ny() - 2 * off);
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = u.at(i, static_cast<int>(j) + off);
  }
  void scatter_col(Field& u, int i, const std::vector<cplx>& in) const {
    const int off = bc == Boundary::Dirichlet ? 1 : 0;
    for (std::size_t j = 0; j < in.size(); ++j) u.at(i, static_cast<int>(j) + off) = in[j];
  }

  void linear_fd(Field& u, double tau) {
    prepare_fd(tau);
    const int off = bc == Boundary::Dirichlet ? 1 : 0;
    if (grid.dim() == 1) {
      gather_row(u, 0, line);
      apply(expl_x, line, line_out);
      impl_x.solve(line_out, scratch);
      scatter_row(u, 0, line_out);
      return;
    }
    const int nx = grid.nx(), ny = grid.ny();
    // (I - tau/2 Ax) u* = (I + tau/2 Ay) u
    Field tmp = u;
    for (int i = off; i < nx - off; ++i) {
      gather_col(u, i, line);
      apply(expl_y, line, line_out);
      scatter_col(tmp, i, line_out);
    }
    for (int j = off; j < ny - off; ++j) {
      gather_row(tmp, j, line);
      impl_x.solve(line, scratch);
      scatter_row(tmp, j, line);
    }
    // (I - tau/2 Ay) u^{n+1} = (I + tau/2 Ax) u*
    Field tmp2 = tmp;
    for (int j = off; j < ny - off; ++j) {
      gather_row(tmp, j, line);
      apply(expl_x, line, line_out);
      scatter_row(tmp2, j, line_out);
    }
    for (int i = off; i < nx - off; ++i) {
      gather_col(tmp2, i, line);
      impl_y.solve(line, scratch);
      scatter_col(u, i, line);
    }
  }
};

Stepper::Stepper(const Grid& grid, Boundary bc, const ParamSet& p, Scheme scheme)
    : impl_(std::make_unique<Impl>(grid, bc, p, scheme)) {
  p.validate();
}

Stepper::~Stepper() = default;

void Stepper::linear(Field& u, double tau) {
  require_same_grid(u.grid(), impl_->grid);
  if (u.bc() != impl_->bc) throw ShapeError("field boundary condition does not match the stepper");
  if (impl_->scheme == Scheme::EigenbasisExponential)
    impl_->linear_eigen(u, tau);
  else
    impl_->linear_fd(u, tau);
}

void Stepper::reaction(Field& u, double tau) const {
  const ParamSet& p = impl_->p;
  const double s1 = p.sigma1, s2 = p.sigma2;
  // In s = ln rho the modulus equation reads s' = k + b e^{s1 s} - c e^{s2 s},
  // and the phase obeys phi' = beta e^{s1 s} - gamma e^{s2 s}.
  auto rhs = [&](double s, double& ds, double& dphi) {
    const double r1 = std::exp(s1 * s), r2 = std::exp(s2 * s);
    ds = p.k + p.b * r1 - p.c * r2;
    dphi = p.beta * r1 - p.gamma * r2;
  };
  for (auto& v : u.values()) {
    const double rho = std::abs(v);
    if (rho == 0.0 || !std::isfinite(rho)) continue;
    const double s0 = std::log(rho);
    const double stiff = std::abs(p.b) * s1 * std::pow(rho, s1) + std::abs(p.c) * s2 * std::pow(rho, s2);
    const int m = static_cast<int>(std::clamp(std::ceil(tau * stiff / 0.1), 1.0, 1e5));
    const double h = tau / m;
    double s = s0, phi = 0.0;
    for (int it = 0; it < m; ++it) {
      double k1s, k1p, k2s, k2p, k3s, k3p, k4s, k4p;
      rhs(s, k1s, k1p);
      rhs(s + 0.5 * h * k1s, k2s, k2p);
      rhs(s + 0.5 * h * k2s, k3s, k3p);
      rhs(s + h * k3s, k4s, k4p);
      s += h / 6.0 * (k1s + 2.0 * k2s + 2.0 * k3s + k4s);
      phi += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
    }
    v *= std::exp(cplx(s - s0, phi));
  }
}

double Stepper::growth_rate(const Field& u) const {
  const ParamSet& p = impl_->p;
  double g = 0.0;
  for (const auto& v : u.values()) {
    const double r = std::abs(v);
    const double rate = p.k + p.b * std::pow(r, p.sigma1) - p.c * std::pow(r, p.sigma2);
    if (!(rate <= g)) g = rate;  // NaN propagates
  }
  return g;
}

void Stepper::step(Field& u, double dt) {
  linear(u, 0.5 * dt);
  reaction(u, dt);
  linear(u, 0.5 * dt);
}

Field step(const Field& u, const ParamSet& p, const SolverConfig& cfg) {
  Stepper st(u.grid(), u.bc(), p, cfg.scheme);
  Field out = u;
  const double dt = cfg.dt > 0.0 ? cfg.dt : default_dt(u.grid(), p, cfg.scheme);
  st.step(out, dt);
  if (!std::isfinite(sup_norm(out))) throw NumericalError("non-finite value after one step");
  return out;
}

// ---------------------------------------------------------------------------
// run

RunResult run(const Field& u0, const ParamSet& p, const SolverConfig& cfg) {
  p.validate();
  if (!(cfg.t_end >= 0.0) || !std::isfinite(cfg.t_end)) throw InputError("t_end must be >= 0");
  if (cfg.diag_stride < 1) throw InputError("diag_stride must be >= 1");
  const double sup0 = sup_norm(u0);
  if (!std::isfinite(sup0)) throw InputError("initial data is not finite");
  if (!(cfg.blowup_threshold > sup0))
    throw InputError("blow-up threshold must exceed the initial sup-norm");
  const double dt_base = cfg.dt > 0.0 ? cfg.dt : default_dt(u0.grid(), p, cfg.scheme);

  Stepper st(u0.grid(), u0.bc(), p, cfg.scheme);
  RunResult res{u0, {}, Outcome::Completed, 0.0, 0, 0, ""};
  res.log.lp_exponent = cfg.lp_exponent;
  res.log.samples.push_back(sample_diagnostics(u0, p, 0.0, cfg.lp_exponent));

  Field& u = res.u;
  double t = 0.0;
  int level = 0;
  const double t_stop = cfg.t_end * (1.0 - 1e-14);
  while (t < t_stop) {
    const double g = st.growth_rate(u);
    // Relax earlier halvings once the growth rate allows it.
    while (level > 0 && std::ldexp(dt_base, -(level - 1)) * g <= 0.25 * cfg.growth_limit) --level;
    while (std::ldexp(dt_base, -level) * g > cfg.growth_limit && level <= cfg.max_halvings) ++level;
    res.min_dt_exponent = std::max(res.min_dt_exponent, level);
    if (level > cfg.max_halvings) {
      res.outcome = Outcome::BlowUp;
      res.message = "step size collapsed below dt/2^" + std::to_string(cfg.max_halvings);
      break;
    }
    const double h = std::min(std::ldexp(dt_base, -level), cfg.t_end - t);
    Field trial = u;
    st.step(trial, h);
    const double s = sup_norm(trial);
    if (!std::isfinite(s)) {
      if (++level > cfg.max_halvings) {
        res.outcome = Outcome::Failed;
        res.message = "non-finite values persist after step halving";
        break;
      }
      continue;
    }
    if (s > cfg.blowup_threshold) {
      res.outcome = Outcome::BlowUp;
      res.message = "sup-norm exceeded " + std::to_string(cfg.blowup_threshold);
      break;
    }
    u = std::move(trial);
    t = (cfg.t_end - t - h <= 0.0) ? cfg.t_end : t + h;
    ++res.steps;
    if (res.steps % cfg.diag_stride == 0 || t >= t_stop)
      res.log.samples.push_back(sample_diagnostics(u, p, t, cfg.lp_exponent));
  }
  if (res.log.samples.back().t < t) res.log.samples.push_back(sample_diagnostics(u, p, t, cfg.lp_exponent));
  res.t_final = t;
  fill_mass_residual(res.log, p);
  return res;
}

}  // namespace cgl
