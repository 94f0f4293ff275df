#include "cgl/discretization.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cgl/errors.hpp"

namespace cgl {

std::string to_string(Boundary bc) { return bc == Boundary::Dirichlet ? "dirichlet" : "neumann"; }

Boundary boundary_from_string(const std::string& s) {
  if (s == "dirichlet" || s == "Dirichlet") return Boundary::Dirichlet;
  if (s == "neumann" || s == "Neumann") return Boundary::Neumann;
  throw InputError("unknown boundary condition '" + s + "'");
}

// ---------------------------------------------------------------------------
// Grid

Grid::Grid(Kind kind, double x0, double x1, double y0, double y1, int nx, int ny)
    : kind_(kind), x0_(x0), x1_(x1), y0_(y0), y1_(y1), nx_(nx), ny_(ny) {
  if (!(x1 > x0) || !std::isfinite(x0) || !std::isfinite(x1))
    throw InputError("grid requires x1 > x0");
  if (nx < 3) throw InputError("grid requires at least 3 nodes per direction");
  if (kind == Kind::Rectangle) {
    if (!(y1 > y0) || !std::isfinite(y0) || !std::isfinite(y1))
      throw InputError("grid requires y1 > y0");
    if (ny < 3) throw InputError("grid requires at least 3 nodes per direction");
  }
  weights_.resize(size());
  for (int j = 0; j < ny_; ++j)
    for (int i = 0; i < nx_; ++i) weights_[index(i, j)] = weight(i, j);
}

Grid Grid::interval(double x0, double x1, int n) {
  return Grid(Kind::Interval, x0, x1, 0.0, 0.0, n, 1);
}

Grid Grid::rectangle(double x0, double x1, double y0, double y1, int nx, int ny) {
  return Grid(Kind::Rectangle, x0, x1, y0, y1, nx, ny);
}

bool Grid::on_boundary(int i, int j) const {
  if (i == 0 || i == nx_ - 1) return true;
  if (kind_ == Kind::Rectangle && (j == 0 || j == ny_ - 1)) return true;
  return false;
}

double Grid::weight(int i, int j) const {
  double w = hx();
  if (i == 0 || i == nx_ - 1) w *= 0.5;
  if (kind_ == Kind::Rectangle) {
    double wy = hy();
    if (j == 0 || j == ny_ - 1) wy *= 0.5;
    w *= wy;
  }
  return w;
}

bool Grid::operator==(const Grid& o) const {
  return kind_ == o.kind_ && nx_ == o.nx_ && ny_ == o.ny_ && x0_ == o.x0_ && x1_ == o.x1_ &&
         y0_ == o.y0_ && y1_ == o.y1_;
}

void require_same_grid(const Grid& a, const Grid& b) {
  if (!(a == b)) throw ShapeError("fields live on different grids");
}

// ---------------------------------------------------------------------------
// Field

Field::Field(Grid grid, Boundary bc) : grid_(std::move(grid)), bc_(bc), values_(grid_.size()) {}

Field::Field(Grid grid, Boundary bc, std::vector<cplx> values)
    : grid_(std::move(grid)), bc_(bc), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    throw ShapeError("field has " + std::to_string(values_.size()) + " values, grid has " +
                     std::to_string(grid_.size()) + " nodes");
  if (bc_ == Boundary::Dirichlet) {
    double scale = 0.0;
    for (const auto& v : values_) scale = std::max(scale, std::abs(v));
    for (int j = 0; j < grid_.ny(); ++j)
      for (int i = 0; i < grid_.nx(); ++i)
        if (grid_.on_boundary(i, j) && std::abs(at(i, j)) > 1e-12 * std::max(1.0, scale))
          throw InputError("Dirichlet field does not vanish on the boundary");
    enforce_boundary();
  }
}

Field Field::sample(const Grid& grid, Boundary bc, const std::function<cplx(double, double)>& f) {
  Field out(grid, bc);
  for (int j = 0; j < grid.ny(); ++j)
    for (int i = 0; i < grid.nx(); ++i) out.at(i, j) = f(grid.x(i), grid.y(j));
  out.enforce_boundary();
  return out;
}

void Field::enforce_boundary() {
  if (bc_ != Boundary::Dirichlet) return;
  const int nx = grid_.nx(), ny = grid_.ny();
  for (int j = 0; j < ny; ++j) {
    at(0, j) = 0.0;
    at(nx - 1, j) = 0.0;
  }
  if (grid_.dim() == 2)
    for (int i = 0; i < nx; ++i) {
      at(i, 0) = 0.0;
      at(i, ny - 1) = 0.0;
    }
}

Field& Field::operator+=(const Field& o) {
  require_same_grid(grid_, o.grid_);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
  return *this;
}

Field& Field::operator-=(const Field& o) {
  require_same_grid(grid_, o.grid_);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
  return *this;
}

Field& Field::operator*=(cplx s) {
  for (auto& v : values_) v *= s;
  return *this;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(cplx s, Field a) { return a *= s; }

// ---------------------------------------------------------------------------
// Laplacian

namespace {

// Second difference along one axis at node k of n, stride s, with Neumann
// ghost reflection at the ends.
inline cplx second_difference(const cplx* f, int k, int n, std::size_t s, double inv_h2) {
  if (k == 0) return 2.0 * (f[s] - f[0]) * inv_h2;
  if (k == n - 1) return 2.0 * (f[-static_cast<std::ptrdiff_t>(s)] - f[0]) * inv_h2;
  return (f[s] - 2.0 * f[0] + f[-static_cast<std::ptrdiff_t>(s)]) * inv_h2;
}

}  // namespace

Field laplacian(const Field& f) {
  const Grid& g = f.grid();
  Field out(g, f.bc());
  const int nx = g.nx(), ny = g.ny();
  const double ix2 = 1.0 / (g.hx() * g.hx());
  const double iy2 = g.dim() == 2 ? 1.0 / (g.hy() * g.hy()) : 0.0;
  const cplx* base = f.values().data();
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      if (f.bc() == Boundary::Dirichlet && g.on_boundary(i, j)) continue;
      const std::size_t id = g.index(i, j);
      cplx v = second_difference(base + id, i, nx, 1, ix2);
      if (g.dim() == 2) v += second_difference(base + id, j, ny, static_cast<std::size_t>(nx), iy2);
      out[id] = v;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Quadrature and norms

double integrate(const Grid& g, std::span<const double> f) {
  if (f.size() != g.size()) throw ShapeError("integrand does not match grid");
  const auto& w = g.weights();
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += w[i] * f[i];
  return s;
}

cplx integrate(const Grid& g, std::span<const cplx> f) {
  if (f.size() != g.size()) throw ShapeError("integrand does not match grid");
  const auto& w = g.weights();
  cplx s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += w[i] * f[i];
  return s;
}

double lp_power(const Field& f, double p) {
  const auto& w = f.grid().weights();
  double s = 0.0;
  if (p == 2.0) {
    for (std::size_t i = 0; i < f.size(); ++i) s += w[i] * std::norm(f[i]);
  } else {
    for (std::size_t i = 0; i < f.size(); ++i) {
      const double a = std::abs(f[i]);
      if (a > 0.0) s += w[i] * std::pow(a, p);
    }
  }
  return s;
}

double norm_lp(const Field& f, double p) { return std::pow(lp_power(f, p), 1.0 / p); }

double norm_l2(const Field& f) { return std::sqrt(lp_power(f, 2.0)); }

double sup_norm(const Field& f) {
  double m = 0.0;
  for (const auto& v : f.values()) {
    const double a = std::abs(v);
    if (!(a <= m)) m = a;  // propagates NaN
  }
  return m;
}

double grad_sq(const Field& f) {
  const Grid& g = f.grid();
  const int nx = g.nx(), ny = g.ny();
  double s = 0.0;
  const double hx = g.hx();
  for (int j = 0; j < ny; ++j) {
    double wy = 1.0;
    if (g.dim() == 2) wy = (j == 0 || j == ny - 1) ? 0.5 * g.hy() : g.hy();
    double row = 0.0;
    for (int i = 0; i + 1 < nx; ++i) row += std::norm(f.at(i + 1, j) - f.at(i, j));
    s += wy * row / hx;
  }
  if (g.dim() == 2) {
    const double hy = g.hy();
    for (int i = 0; i < nx; ++i) {
      const double wx = (i == 0 || i == nx - 1) ? 0.5 * hx : hx;
      double col = 0.0;
      for (int j = 0; j + 1 < ny; ++j) col += std::norm(f.at(i, j + 1) - f.at(i, j));
      s += wx * col / hy;
    }
  }
  return s;
}

double norm_h1(const Field& f) { return std::sqrt(lp_power(f, 2.0) + grad_sq(f)); }

cplx inner(const Field& f, const Field& g) {
  require_same_grid(f.grid(), g.grid());
  const auto& w = f.grid().weights();
  cplx s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += w[i] * f[i] * std::conj(g[i]);
  return s;
}

// ---------------------------------------------------------------------------
// Eigenbases

double dirichlet_mode_1d(int j, double x, double x0, double x1) {
  const double len = x1 - x0;
  const double xc = x - 0.5 * (x0 + x1);
  const double amp = std::sqrt(2.0 / len);
  const double arg = j * std::numbers::pi * xc / len;
  return (j % 2 == 1) ? amp * std::cos(arg) : amp * std::sin(arg);
}

double neumann_mode_1d(int j, double x, double x0, double x1) {
  const double len = x1 - x0;
  if (j == 0) return std::sqrt(1.0 / len);
  return std::sqrt(2.0 / len) * std::cos(j * std::numbers::pi * (x - x0) / len);
}

double mode_eigenvalue_1d(int j, double length) {
  const double w = j * std::numbers::pi / length;
  return w * w;
}

int max_mode_index(int n) { return n - 2; }

Field EigenBasis::field(std::size_t m) const {
  const Mode& md = modes.at(m);
  std::vector<cplx> v(md.values.begin(), md.values.end());
  Field f(grid, bc);
  for (std::size_t i = 0; i < v.size(); ++i) f[i] = v[i];
  return f;
}

EigenBasis eigenbasis(const Grid& grid, Boundary bc, std::size_t count) {
  if (count < 1) throw InputError("eigenbasis needs count >= 1");
  const int lo = bc == Boundary::Dirichlet ? 1 : 0;
  const int imax = max_mode_index(grid.nx());
  const int jmax = grid.dim() == 2 ? max_mode_index(grid.ny()) : lo;

  // Enumerate a candidate set large enough to contain the lowest `count`
  // analytic modes, then check every needed mode is resolved.
  struct Cand {
    int i, j;
    double mu;
  };
  std::vector<Cand> cands;
  const double lx = grid.lx(), ly = grid.dim() == 2 ? grid.ly() : 1.0;
  // Analytic enumeration bound: indices up to count + lo in each direction.
  const int ibound = static_cast<int>(count) + lo;
  const int jbound = grid.dim() == 2 ? static_cast<int>(count) + lo : lo;
  for (int j = lo; j <= jbound; ++j)
    for (int i = lo; i <= ibound; ++i) {
      double mu = mode_eigenvalue_1d(i, lx);
      if (grid.dim() == 2) mu += mode_eigenvalue_1d(j, ly);
      cands.push_back({i, j, mu});
    }
  std::stable_sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
    if (a.mu != b.mu) return a.mu < b.mu;
    if (a.i != b.i) return a.i < b.i;
    return a.j < b.j;
  });
  if (cands.size() < count) throw AliasingError("not enough modes");
  cands.resize(count);
  for (const auto& c : cands)
    if (c.i > imax || (grid.dim() == 2 && c.j > jmax))
      throw AliasingError("mode (" + std::to_string(c.i) + "," + std::to_string(c.j) +
                          ") has wavelength below two grid spacings");

  EigenBasis basis{grid, bc, {}};
  basis.modes.reserve(count);
  auto mode1d = [&](int idx, double x, double a, double b) {
    return bc == Boundary::Dirichlet ? dirichlet_mode_1d(idx, x, a, b)
                                     : neumann_mode_1d(idx, x, a, b);
  };
  for (const auto& c : cands) {
    Mode m;
    m.index = {c.i, grid.dim() == 2 ? c.j : 0};
    m.mu = c.mu;
    m.values.resize(grid.size());
    std::vector<double> ex(grid.nx()), ey(grid.ny(), 1.0);
    for (int i = 0; i < grid.nx(); ++i) ex[i] = mode1d(c.i, grid.x(i), grid.x0(), grid.x1());
    double amp = bc == Boundary::Dirichlet || c.i > 0 ? std::sqrt(2.0 / lx) : std::sqrt(1.0 / lx);
    if (grid.dim() == 2) {
      for (int j = 0; j < grid.ny(); ++j) ey[j] = mode1d(c.j, grid.y(j), grid.y0(), grid.y1());
      amp *= bc == Boundary::Dirichlet || c.j > 0 ? std::sqrt(2.0 / ly) : std::sqrt(1.0 / ly);
    }
    for (int j = 0; j < grid.ny(); ++j)
      for (int i = 0; i < grid.nx(); ++i) m.values[grid.index(i, j)] = ex[i] * ey[j];
    if (bc == Boundary::Dirichlet) {
      for (int j = 0; j < grid.ny(); ++j)
        for (int i = 0; i < grid.nx(); ++i)
          if (grid.on_boundary(i, j)) m.values[grid.index(i, j)] = 0.0;
    }
    m.norm_const = amp;
    basis.modes.push_back(std::move(m));
  }
  return basis;
}

std::vector<cplx> project(const Field& f, const EigenBasis& basis) {
  require_same_grid(f.grid(), basis.grid);
  const auto& w = basis.grid.weights();
  std::vector<cplx> c(basis.size());
  for (std::size_t m = 0; m < basis.size(); ++m) {
    const auto& e = basis.modes[m].values;
    cplx s = 0.0;
    for (std::size_t i = 0; i < e.size(); ++i) s += w[i] * f[i] * e[i];
    c[m] = s;
  }
  return c;
}

Field synthesize(std::span<const cplx> coeffs, const EigenBasis& basis) {
  if (coeffs.size() != basis.size()) throw ShapeError("coefficient count does not match basis");
  Field out(basis.grid, basis.bc);
  for (std::size_t m = 0; m < basis.size(); ++m) {
    const auto& e = basis.modes[m].values;
    for (std::size_t i = 0; i < e.size(); ++i) out[i] += coeffs[m] * e[i];
  }
  return out;
}

}  // namespace cgl
