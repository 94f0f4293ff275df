#include "cgl/bifurcation.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "cgl/errors.hpp"

namespace cgl {

namespace {

// |w|^s without pow for the common even exponents.
double abs_pow(cplx w, double s) {
  const double n = std::norm(w);
  if (s == 2.0) return n;
  if (s == 4.0) return n * n;
  if (s == 1.0) return std::sqrt(n);
  if (n == 0.0) return 0.0;
  return std::pow(n, 0.5 * s);
}

std::vector<double> mode_table(int idx, int n, double a, double b, double h) {
  std::vector<double> t(n);
  for (int i = 0; i < n; ++i) t[i] = (i == 0 || i == n - 1) ? 0.0 : dirichlet_mode_1d(idx, a + i * h, a, b);
  return t;
}

Field product_mode(const Grid& g, std::array<int, 2> m) {
  if (m[0] < 1 || (g.dim() == 2 && m[1] < 1)) throw InputError("Dirichlet mode indices start at 1");
  if (m[0] > max_mode_index(g.nx()) || (g.dim() == 2 && m[1] > max_mode_index(g.ny())))
    throw AliasingError("mode not resolved by the grid");
  const auto tx = mode_table(m[0], g.nx(), g.x0(), g.x1(), g.hx());
  std::vector<double> ty(g.ny(), 1.0);
  if (g.dim() == 2) ty = mode_table(m[1], g.ny(), g.y0(), g.y1(), g.hy());
  std::vector<cplx> v(g.size());
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) v[g.index(i, j)] = tx[i] * ty[j];
  return Field(g, Boundary::Dirichlet, std::move(v));
}

double mode_mu(const Grid& g, std::array<int, 2> m) {
  double mu = mode_eigenvalue_1d(m[0], g.lx());
  if (g.dim() == 2) mu += mode_eigenvalue_1d(m[1], g.ly());
  return mu;
}

double interior_l2(const Grid& g, const std::vector<cplx>& r) {
  double s = 0.0;
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) {
      if (g.on_boundary(i, j)) continue;
      s += g.weight(i, j) * std::norm(r[g.index(i, j)]);
    }
  return std::sqrt(s);
}

}  // namespace

// ---------------------------------------------------------------------------
// Eigenpairs and P

DoubleEigenpair make_pair(const Grid& grid, std::array<int, 2> m1, std::array<int, 2> m2) {
  if (grid.dim() != 2) throw InputError("a double eigenvalue needs a rectangle");
  if (m1 == m2) throw InputError("the two modes must differ");
  const double mu1 = mode_mu(grid, m1), mu2 = mode_mu(grid, m2);
  if (std::abs(mu1 - mu2) > 1e-12 * mu1) throw InputError("modes do not share an eigenvalue");
  return DoubleEigenpair{grid, mu1, product_mode(grid, m1), product_mode(grid, m2), m1, m2, false};
}

DoubleEigenpair make_simple(const Grid& grid, std::array<int, 2> m) {
  if (grid.dim() == 1) m[1] = 0;
  return DoubleEigenpair{grid, mode_mu(grid, m), product_mode(grid, m), Field(grid, Boundary::Dirichlet), m, m, true};
}

DoubleEigenpair square_pair(int n, bool swapped) {
  const Grid g = Grid::rectangle(-1.0, 1.0, -1.0, 1.0, n, n);
  const std::array<int, 2> v1{1, 2}, v2{2, 1};
  return swapped ? make_pair(g, v2, v1) : make_pair(g, v1, v2);
}

double eigen_residual(const DoubleEigenpair& pair) {
  auto res = [&](const Field& u) {
    const Field l = laplacian(u);
    std::vector<cplx> r(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) r[i] = l[i] + pair.lambda0 * u[i];
    return interior_l2(u.grid(), r);
  };
  return pair.simple ? res(pair.u1) : std::max(res(pair.u1), res(pair.u2));
}

cplx eval_P(const DoubleEigenpair& pair, cplx alpha, double sigma1) {
  if (!(sigma1 > 0.0)) throw InputError("sigma1 must be positive");
  const auto& w = pair.grid.weights();
  cplx s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double a = pair.u1[i].real(), b = pair.u2[i].real();
    const cplx z = a + alpha * b;
    s += w[i] * abs_pow(z, sigma1) * z * (alpha * a - b);
  }
  return s;
}

std::vector<PRoot> find_roots_P(const DoubleEigenpair& pair, double sigma1) {
  const double h = 1e-6;
  auto jac = [&](cplx a, cplx& d_re, cplx& d_im) {
    d_re = (eval_P(pair, a + h, sigma1) - eval_P(pair, a - h, sigma1)) / (2.0 * h);
    d_im = (eval_P(pair, a + cplx(0, h), sigma1) - eval_P(pair, a - cplx(0, h), sigma1)) / (2.0 * h);
  };
  std::vector<PRoot> roots;
  for (int sy = 0; sy < 9; ++sy)
    for (int sx = 0; sx < 9; ++sx) {
      cplx a(-2.0 + 0.5 * sx, -2.0 + 0.5 * sy);
      cplx p = eval_P(pair, a, sigma1);
      for (int it = 0; it < 60 && std::abs(p) > 1e-15; ++it) {
        cplx dr, di;
        jac(a, dr, di);
        const double det = dr.real() * di.imag() - di.real() * dr.imag();
        if (std::abs(det) < 1e-14) break;
        // Solve [dr di] (dx, dy) = -p as a real 2x2 system.
        const double dx = (-p.real() * di.imag() + p.imag() * di.real()) / det;
        const double dy = (-dr.real() * p.imag() + dr.imag() * p.real()) / det;
        a += cplx(dx, dy);
        if (std::abs(a) > 10.0) break;
        p = eval_P(pair, a, sigma1);
        if (std::hypot(dx, dy) < 1e-15) break;
      }
      if (!(std::abs(p) < 1e-10) || std::abs(a) > 10.0) continue;
      auto dup = std::find_if(roots.begin(), roots.end(), [&](const PRoot& r) { return std::abs(r.alpha0 - a) < 1e-6; });
      if (dup != roots.end()) {
        if (std::abs(p) < dup->residual) {
          dup->alpha0 = a;
          dup->residual = std::abs(p);
        }
        continue;
      }
      roots.push_back(PRoot{a, {}, 0.0, false, std::abs(p)});
    }
  for (auto& r : roots) {
    cplx dr, di;
    jac(r.alpha0, dr, di);
    r.P_prime = dr;
    r.jacobian_det = dr.real() * di.imag() - di.real() * dr.imag();
    r.simple = std::abs(r.jacobian_det) > 1e-6;
  }
  std::sort(roots.begin(), roots.end(), [](const PRoot& x, const PRoot& y) {
    if (std::abs(x.alpha0.real() - y.alpha0.real()) > 1e-6) return x.alpha0.real() < y.alpha0.real();
    return x.alpha0.imag() < y.alpha0.imag();
  });
  return roots;
}

// ---------------------------------------------------------------------------
// Galerkin machinery

struct BifurcationProblem::Impl {
  DoubleEigenpair pair;
  TrigParamSet trig;
  BifurcationOptions opts;
  Grid grid;
  int nx, ny;
  std::vector<double> wx, wy;
  // Full basis: mode indices and eigenvalues; tables indexed by 1-D index.
  std::vector<std::array<int, 2>> idx;
  std::vector<double> mu;
  std::vector<std::vector<double>> tx, ty;
  int jmax = 0;
  std::vector<std::size_t> comp;  // positions of complement modes in the full basis
  std::vector<std::array<int, 2>> comp_idx;
  std::vector<double> comp_mu;
  std::size_t p1 = 0, p2 = 0;
  double radius = 0.0;
  cplx eith, eig1, eig2;

  explicit Impl(DoubleEigenpair pr, TrigParamSet t, BifurcationOptions o)
      : pair(std::move(pr)), trig(t), opts(o), grid(pair.grid), nx(grid.nx()), ny(grid.ny()) {
    if (!(trig.sigma1 > 0.0) || !(trig.sigma2 > 0.0)) throw InputError("sigma1 and sigma2 must be positive");
    if (trig.sigma1 < 1.0 && !opts.allow_small_sigma1)
      throw HypothesisError("sigma1 >= 1 is required (override with allow_small_sigma1)");
    if (trig.sigma1 + 1.0 > trig.sigma2) throw HypothesisError("need sigma1 + 1 <= sigma2");
    if (trig.chi < -1 || trig.chi > 1) throw InputError("chi must be -1, 0 or 1");
    eith = std::polar(1.0, trig.theta);
    eig1 = std::polar(1.0, trig.gamma1);
    eig2 = static_cast<double>(trig.chi) * std::polar(1.0, trig.gamma2);

    wx.assign(nx, grid.hx());
    wx.front() *= 0.5;
    wx.back() *= 0.5;
    wy.assign(ny, 1.0);
    if (grid.dim() == 2) {
      wy.assign(ny, grid.hy());
      wy.front() *= 0.5;
      wy.back() *= 0.5;
    }

    const EigenBasis basis = eigenbasis(grid, Boundary::Dirichlet, opts.basis_size);
    int imax = 0;
    for (const auto& m : basis.modes) {
      idx.push_back(m.index);
      mu.push_back(m.mu);
      imax = std::max(imax, m.index[0]);
      jmax = std::max(jmax, m.index[1]);
    }
    tx.resize(imax + 1);
    for (int i = 1; i <= imax; ++i) tx[i] = mode_table(i, nx, grid.x0(), grid.x1(), grid.hx());
    ty.resize(jmax + 1);
    if (grid.dim() == 2) {
      for (int j = 1; j <= jmax; ++j) ty[j] = mode_table(j, ny, grid.y0(), grid.y1(), grid.hy());
    } else {
      ty[0].assign(1, 1.0);
    }

    auto find = [&](std::array<int, 2> m) {
      for (std::size_t k = 0; k < idx.size(); ++k)
        if (idx[k] == m) return k;
      throw InputError("basis_size too small to contain the eigenpair");
    };
    p1 = find(pair.index1);
    p2 = pair.simple ? p1 : find(pair.index2);
    radius = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < idx.size(); ++k) {
      if (k == p1 || k == p2) continue;
      if (std::abs(mu[k] - pair.lambda0) <= 1e-12 * pair.lambda0)
        throw InputError("eigenvalue has multiplicity above the supplied pair");
      comp.push_back(k);
      comp_idx.push_back(idx[k]);
      comp_mu.push_back(mu[k]);
      radius = std::min(radius, 0.5 * std::abs(mu[k] - pair.lambda0));
    }
  }

  // Trapezoidal inner products with every basis mode (separable transform).
  std::vector<cplx> project_all(const std::vector<cplx>& f) const {
    std::vector<cplx> a((jmax + 1) * static_cast<std::size_t>(nx), 0.0);
    const int jlo = grid.dim() == 2 ? 1 : 0;
    for (int j = jlo; j <= jmax; ++j) {
      cplx* row = &a[static_cast<std::size_t>(j) * nx];
      for (int y = 0; y < ny; ++y) {
        const double c = wy[y] * ty[j][y];
        if (c == 0.0) continue;
        const cplx* fr = &f[static_cast<std::size_t>(y) * nx];
        for (int x = 0; x < nx; ++x) row[x] += c * fr[x];
      }
    }
    std::vector<cplx> out(idx.size());
    for (std::size_t k = 0; k < idx.size(); ++k) {
      const auto& t = tx[idx[k][0]];
      const cplx* row = &a[static_cast<std::size_t>(idx[k][1]) * nx];
      cplx s = 0.0;
      for (int x = 0; x < nx; ++x) s += wx[x] * t[x] * row[x];
      out[k] = s;
    }
    return out;
  }

  // Node values of sum_k c_k phi_{comp[k]}.
  std::vector<cplx> synth_comp(const std::vector<cplx>& c) const {
    std::vector<cplx> b((jmax + 1) * static_cast<std::size_t>(nx), 0.0);
    for (std::size_t k = 0; k < comp.size(); ++k) {
      if (c[k] == 0.0) continue;
      const auto& m = idx[comp[k]];
      const auto& t = tx[m[0]];
      cplx* row = &b[static_cast<std::size_t>(m[1]) * nx];
      for (int x = 0; x < nx; ++x) row[x] += c[k] * t[x];
    }
    std::vector<cplx> f(grid.size(), 0.0);
    const int jlo = grid.dim() == 2 ? 1 : 0;
    for (int y = 0; y < ny; ++y) {
      cplx* fr = &f[static_cast<std::size_t>(y) * nx];
      for (int j = jlo; j <= jmax; ++j) {
        const double v = ty[j][y];
        if (v == 0.0) continue;
        const cplx* row = &b[static_cast<std::size_t>(j) * nx];
        for (int x = 0; x < nx; ++x) fr[x] += v * row[x];
      }
    }
    return f;
  }

  void apply_M(std::vector<cplx>& u) const {
    for (auto& z : u) z = (eig1 * abs_pow(z, trig.sigma1) + eig2 * abs_pow(z, trig.sigma2)) * z;
  }

  std::vector<cplx> base(double eps, cplx alpha) const {
    std::vector<cplx> b(grid.size());
    for (std::size_t i = 0; i < b.size(); ++i)
      b[i] = eps * pair.u1[i] + (pair.simple ? cplx(0.0) : eps * alpha * pair.u2[i]);
    return b;
  }

  double h1(const std::vector<cplx>& c) const {
    double s = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) s += (1.0 + comp_mu[k]) * std::norm(c[k]);
    return std::sqrt(s);
  }

  cplx pair_inner(const std::vector<cplx>& f, const Field& v) const {
    const auto& w = grid.weights();
    cplx s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += w[i] * f[i] * v[i].real();
    return s;
  }
};

BifurcationProblem::BifurcationProblem(DoubleEigenpair pair, TrigParamSet trig, BifurcationOptions opts)
    : impl_(std::make_unique<Impl>(std::move(pair), trig, opts)) {}
BifurcationProblem::~BifurcationProblem() = default;
BifurcationProblem::BifurcationProblem(BifurcationProblem&&) noexcept = default;
BifurcationProblem& BifurcationProblem::operator=(BifurcationProblem&&) noexcept = default;

const DoubleEigenpair& BifurcationProblem::pair() const { return impl_->pair; }
const TrigParamSet& BifurcationProblem::trig() const { return impl_->trig; }
const BifurcationOptions& BifurcationProblem::options() const { return impl_->opts; }
std::size_t BifurcationProblem::complement_size() const { return impl_->comp.size(); }
const std::vector<std::array<int, 2>>& BifurcationProblem::complement_indices() const { return impl_->comp_idx; }
const std::vector<double>& BifurcationProblem::complement_mu() const { return impl_->comp_mu; }
double BifurcationProblem::resolvent_radius() const { return impl_->radius; }

YSolution BifurcationProblem::solve_y(double eps, cplx alpha, cplx lambda) const {
  const Impl& m = *impl_;
  if (!(eps >= 0.0)) throw InputError("eps must be >= 0");
  if (std::abs(lambda - m.eith * m.pair.lambda0) > m.radius)
    throw HypothesisError("lambda lies outside the resolvent disk around e^{i theta} lambda0");
  YSolution out;
  out.coeffs.assign(m.comp.size(), 0.0);
  if (eps == 0.0) {
    out.iterations = 1;
    return out;
  }
  std::vector<cplx> res(m.comp.size());
  for (std::size_t k = 0; k < m.comp.size(); ++k) res[k] = 1.0 / (lambda - m.eith * m.comp_mu[k]);
  const std::vector<cplx> b = m.base(eps, alpha);
  double prev = 0.0;
  std::vector<cplx> next(m.comp.size());
  for (int it = 1; it <= m.opts.picard_max; ++it) {
    std::vector<cplx> u = m.synth_comp(out.coeffs);
    for (std::size_t i = 0; i < u.size(); ++i) u[i] += b[i];
    m.apply_M(u);
    const auto pr = m.project_all(u);
    std::vector<cplx> d(m.comp.size());
    for (std::size_t k = 0; k < m.comp.size(); ++k) {
      next[k] = -pr[m.comp[k]] * res[k];
      d[k] = next[k] - out.coeffs[k];
    }
    const double diff = m.h1(d), nrm = m.h1(next);
    out.coeffs.swap(next);
    out.iterations = it;
    if (it >= 2 && prev > 1e-13 * nrm) {
      const double ratio = diff / prev;
      out.max_ratio = std::max(out.max_ratio, ratio);
      if (ratio >= m.opts.contraction_limit)
        throw ConvergenceError("inner fixed point does not contract (eps too large)");
    }
    if (diff <= m.opts.picard_tol * nrm || diff == 0.0) return out;
    prev = diff;
  }
  throw ConvergenceError("inner fixed point did not converge in " + std::to_string(m.opts.picard_max) + " iterations");
}

std::array<cplx, 2> BifurcationProblem::outer_residual(double eps, cplx alpha, cplx lambda, YSolution* y) const {
  const Impl& m = *impl_;
  if (!(eps > 0.0)) throw InputError("outer residual needs eps > 0");
  YSolution ys = solve_y(eps, alpha, lambda);
  std::vector<cplx> u = m.synth_comp(ys.coeffs);
  const auto b = m.base(eps, alpha);
  for (std::size_t i = 0; i < u.size(); ++i) u[i] += b[i];
  m.apply_M(u);
  const cplx m1 = m.pair_inner(u, m.pair.u1);
  std::array<cplx, 2> g;
  g[0] = lambda - m.eith * m.pair.lambda0 + m1 / eps;
  if (m.pair.simple) {
    g[1] = 0.0;
  } else {
    const cplx m2 = m.pair_inner(u, m.pair.u2);
    g[1] = (alpha * m1 - m2) / std::pow(eps, m.trig.sigma1 + 1.0);
  }
  if (y) *y = std::move(ys);
  return g;
}

BranchPoint BifurcationProblem::solve_point(double eps, cplx alpha_init, cplx lambda_init) const {
  const Impl& m = *impl_;
  BranchPoint pt;
  pt.eps = eps;
  if (eps == 0.0) {
    pt.alpha = m.pair.simple ? cplx(0.0) : alpha_init;
    pt.lambda = m.eith * m.pair.lambda0;
    pt.y_coeffs.assign(m.comp.size(), 0.0);
    return pt;
  }
  if (!(eps > 0.0)) throw InputError("eps must be >= 0");

  const int n = m.pair.simple ? 2 : 4;
  Eigen::Vector4d z(lambda_init.real(), lambda_init.imag(), alpha_init.real(), alpha_init.imag());
  if (m.pair.simple) z[2] = z[3] = 0.0;
  auto G = [&](const Eigen::Vector4d& v) {
    const auto g = outer_residual(eps, cplx(v[2], v[3]), cplx(v[0], v[1]));
    return Eigen::Vector4d(g[0].real(), g[0].imag(), g[1].real(), g[1].imag());
  };
  Eigen::Vector4d g = G(z);
  int it = 0;
  for (;; ++it) {
    if (g.head(n).lpNorm<Eigen::Infinity>() < m.opts.newton_tol) break;
    if (it >= m.opts.newton_max)
      throw ConvergenceError("outer Newton did not converge in " + std::to_string(m.opts.newton_max) + " iterations");
    Eigen::MatrixXd J(n, n);
    for (int c = 0; c < n; ++c) {
      Eigen::Vector4d zp = z, zm = z;
      zp[c] += m.opts.fd_step;
      zm[c] -= m.opts.fd_step;
      J.col(c) = (G(zp) - G(zm)).head(n) / (2.0 * m.opts.fd_step);
    }
    const Eigen::VectorXd dz = J.fullPivLu().solve(-g.head(n));
    if (!dz.allFinite()) throw ConvergenceError("singular outer Jacobian");
    double t = 1.0;
    bool accepted = false;
    const double g0 = g.head(n).norm();
    for (int k = 0; k < 20; ++k, t *= 0.5) {
      Eigen::Vector4d zt = z;
      zt.head(n) += t * dz;
      Eigen::Vector4d gt;
      try {
        gt = G(zt);
      } catch (const HypothesisError&) {
        continue;
      } catch (const ConvergenceError&) {
        continue;
      }
      if (gt.head(n).norm() < g0) {
        z = zt;
        g = gt;
        accepted = true;
        break;
      }
    }
    if (!accepted) throw ConvergenceError("outer Newton stagnated");
  }

  YSolution ys;
  outer_residual(eps, cplx(z[2], z[3]), cplx(z[0], z[1]), &ys);
  pt.lambda = cplx(z[0], z[1]);
  pt.alpha = cplx(z[2], z[3]);
  pt.y_coeffs = std::move(ys.coeffs);
  pt.y_h1 = m.h1(pt.y_coeffs);
  pt.outer_residual = g.head(n).lpNorm<Eigen::Infinity>();
  pt.newton_iterations = it;
  pt.residual = galerkin_residual(assemble(pt), pt.lambda);
  return pt;
}

Branch BifurcationProblem::continue_branch(cplx alpha0, const std::vector<double>& eps_grid) const {
  const Impl& m = *impl_;
  if (eps_grid.empty()) throw InputError("eps grid is empty");
  for (std::size_t i = 0; i < eps_grid.size(); ++i) {
    if (!(eps_grid[i] >= 0.0)) throw InputError("eps grid must be nonnegative");
    if (i > 0 && !(eps_grid[i] > eps_grid[i - 1])) throw InputError("eps grid must be increasing");
  }
  Branch br;
  br.alpha0 = m.pair.simple ? cplx(0.0) : alpha0;
  const cplx l0 = m.eith * m.pair.lambda0;
  for (double eps : eps_grid) {
    cplx a = br.alpha0, l = l0;
    if (!br.points.empty() && eps > 0.0) {
      const BranchPoint& prev = br.points.back();
      a = prev.alpha;
      if (prev.eps > 0.0)
        l = l0 + (prev.lambda - l0) * std::pow(eps / prev.eps, m.trig.sigma1);
      else
        l = l0 - std::pow(eps, m.trig.sigma1) * leading_coefficient(br.alpha0);
    } else if (eps > 0.0) {
      l = l0 - std::pow(eps, m.trig.sigma1) * leading_coefficient(br.alpha0);
    }
    try {
      br.points.push_back(solve_point(eps, a, l));
    } catch (const Error& e) {
      br.truncated = true;
      br.message = "branch truncated at eps = " + std::to_string(eps) + ": " + e.what();
      break;
    }
    const auto& pts = br.points;
    if (pts.size() >= 2) {
      const auto& p = pts[pts.size() - 2];
      const auto& q = pts.back();
      const double de = q.eps - p.eps;
      br.lipschitz_lambda = std::max(br.lipschitz_lambda, std::abs(q.lambda - p.lambda) / de);
      br.lipschitz_alpha = std::max(br.lipschitz_alpha, std::abs(q.alpha - p.alpha) / de);
    }
  }
  return br;
}

Field BifurcationProblem::synthesize_y(const std::vector<cplx>& coeffs) const {
  if (coeffs.size() != impl_->comp.size()) throw ShapeError("coefficient count does not match the complement");
  return Field(impl_->grid, Boundary::Dirichlet, impl_->synth_comp(coeffs));
}

Field BifurcationProblem::assemble(const BranchPoint& pt) const {
  const Impl& m = *impl_;
  std::vector<cplx> u = pt.y_coeffs.empty() ? std::vector<cplx>(m.grid.size(), 0.0) : m.synth_comp(pt.y_coeffs);
  const auto b = m.base(pt.eps, pt.alpha);
  for (std::size_t i = 0; i < u.size(); ++i) u[i] += b[i];
  return Field(m.grid, Boundary::Dirichlet, std::move(u));
}

double BifurcationProblem::y_h1(const std::vector<cplx>& coeffs) const { return impl_->h1(coeffs); }

Field BifurcationProblem::apply_M(const Field& u) const {
  std::vector<cplx> v(u.values().begin(), u.values().end());
  impl_->apply_M(v);
  return Field(u.grid(), u.bc(), std::move(v));
}

double BifurcationProblem::galerkin_residual(const Field& u, cplx lambda) const {
  const Impl& m = *impl_;
  require_same_grid(u.grid(), m.grid);
  std::vector<cplx> v(u.values().begin(), u.values().end());
  const auto cu = m.project_all(v);
  m.apply_M(v);
  const auto cm = m.project_all(v);
  double s = 0.0;
  for (std::size_t k = 0; k < cu.size(); ++k) s += std::norm((lambda - m.eith * m.mu[k]) * cu[k] + cm[k]);
  return std::sqrt(s);
}

double BifurcationProblem::grid_residual(const Field& u, cplx lambda) const {
  const Impl& m = *impl_;
  const Field lap = laplacian(u);
  const Field mu = apply_M(u);
  std::vector<cplx> r(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) r[i] = lambda * u[i] + m.eith * lap[i] + mu[i];
  return interior_l2(u.grid(), r);
}

cplx BifurcationProblem::lambda_from_field(const Field& u) const {
  const Impl& m = *impl_;
  std::vector<cplx> v(u.values().begin(), u.values().end());
  const cplx d = m.pair_inner(v, m.pair.u1);
  if (d == 0.0) throw InputError("field has no component along u1");
  m.apply_M(v);
  return m.eith * m.pair.lambda0 - m.pair_inner(v, m.pair.u1) / d;
}

cplx BifurcationProblem::leading_coefficient(cplx alpha0) const {
  const Impl& m = *impl_;
  const auto& w = m.grid.weights();
  cplx s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double a = m.pair.u1[i].real(), b = m.pair.simple ? 0.0 : m.pair.u2[i].real();
    const cplx z = a + alpha0 * b;
    s += w[i] * abs_pow(z, m.trig.sigma1) * z * a;
  }
  return m.eig1 * s;
}

// ---------------------------------------------------------------------------
// Free-function front ends

std::vector<cplx> solve_y_fixed_point(const DoubleEigenpair& pair, const TrigParamSet& trig, double eps,
                                      cplx alpha, cplx lambda, std::size_t basis_size) {
  BifurcationOptions o;
  o.basis_size = basis_size;
  return BifurcationProblem(pair, trig, o).solve_y(eps, alpha, lambda).coeffs;
}

BranchPoint solve_branch_point(const DoubleEigenpair& pair, const TrigParamSet& trig, double eps,
                               cplx alpha_init, cplx lambda_init, std::size_t basis_size) {
  BifurcationOptions o;
  o.basis_size = basis_size;
  return BifurcationProblem(pair, trig, o).solve_point(eps, alpha_init, lambda_init);
}

Branch continue_branch(const DoubleEigenpair& pair, const TrigParamSet& trig, cplx alpha0,
                       const std::vector<double>& eps_grid, std::size_t basis_size) {
  BifurcationOptions o;
  o.basis_size = basis_size;
  return BifurcationProblem(pair, trig, o).continue_branch(alpha0, eps_grid);
}

AsymptoticReport asymptotic_check(const Branch& branch, const DoubleEigenpair& pair, const TrigParamSet& trig,
                                  double eps_max) {
  AsymptoticReport rep;
  const double s1 = trig.sigma1;
  rep.correction_exponent = std::min(s1, trig.sigma2 - s1);
  const cplx eith = std::polar(1.0, trig.theta);
  const cplx l0 = eith * pair.lambda0;

  {
    const auto& w = pair.grid.weights();
    cplx s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double a = pair.u1[i].real(), b = pair.simple ? 0.0 : pair.u2[i].real();
      const cplx z = a + branch.alpha0 * b;
      s += w[i] * abs_pow(z, s1) * z * a;
    }
    rep.coefficient_quadrature = std::polar(1.0, trig.gamma1) * s;
  }

  std::vector<double> t, lx, ly;
  std::vector<cplx> r;
  for (const auto& p : branch.points) {
    if (!(p.eps > 0.0) || p.eps > eps_max) continue;
    const cplx d = p.lambda - l0;
    r.push_back(-d / std::pow(p.eps, s1));
    t.push_back(std::pow(p.eps, rep.correction_exponent));
    lx.push_back(std::log(p.eps));
    ly.push_back(std::log(std::abs(d)));
  }
  rep.points_used = static_cast<int>(r.size());
  if (r.size() < 2) throw InputError("asymptotic check needs at least two branch points with eps > 0");

  auto slope_intercept = [](const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      sx += x[i];
      sy += y[i];
      sxx += x[i] * x[i];
      sxy += x[i] * y[i];
    }
    const double den = n * sxx - sx * sx;
    const double slope = den != 0.0 ? (n * sxy - sx * sy) / den : 0.0;
    return std::pair{slope, (sy - slope * sx) / n};
  };
  std::vector<double> re(r.size()), im(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    re[i] = r[i].real();
    im[i] = r[i].imag();
  }
  rep.coefficient_fit = cplx(slope_intercept(t, re).second, slope_intercept(t, im).second);
  rep.fit_exponent = slope_intercept(lx, ly).first;
  const double ref = std::abs(rep.coefficient_quadrature);
  rep.relative_deviation = std::abs(rep.coefficient_fit - rep.coefficient_quadrature) / (ref > 0.0 ? ref : 1.0);
  return rep;
}

}  // namespace cgl
