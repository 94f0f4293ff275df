#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace cgl {

using cplx = std::complex<double>;

enum class Boundary { Dirichlet, Neumann };

std::string to_string(Boundary bc);
Boundary boundary_from_string(const std::string& s);

/// Uniform node grid on an interval or a rectangle. Node counts include both
/// endpoints; storage order is x fastest.
class Grid {
 public:
  enum class Kind { Interval, Rectangle };

  static Grid interval(double x0, double x1, int n);
  static Grid rectangle(double x0, double x1, double y0, double y1, int nx, int ny);

  Kind kind() const { return kind_; }
  int dim() const { return kind_ == Kind::Interval ? 1 : 2; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  std::size_t size() const { return static_cast<std::size_t>(nx_) * ny_; }

  double x0() const { return x0_; }
  double x1() const { return x1_; }
  double y0() const { return y0_; }
  double y1() const { return y1_; }
  double hx() const { return (x1_ - x0_) / (nx_ - 1); }
  double hy() const { return kind_ == Kind::Interval ? 1.0 : (y1_ - y0_) / (ny_ - 1); }
  double lx() const { return x1_ - x0_; }
  double ly() const { return y1_ - y0_; }
  double x(int i) const { return x0_ + i * hx(); }
  double y(int j) const { return kind_ == Kind::Interval ? 0.0 : y0_ + j * hy(); }
  double volume() const { return kind_ == Kind::Interval ? lx() : lx() * ly(); }

  std::size_t index(int i, int j = 0) const {
    return static_cast<std::size_t>(j) * nx_ + static_cast<std::size_t>(i);
  }
  bool on_boundary(int i, int j = 0) const;

  /// Trapezoidal weight of node (i, j).
  double weight(int i, int j = 0) const;
  const std::vector<double>& weights() const { return weights_; }

  bool operator==(const Grid& o) const;

 private:
  Grid(Kind kind, double x0, double x1, double y0, double y1, int nx, int ny);

  Kind kind_;
  double x0_, x1_, y0_, y1_;
  int nx_, ny_;
  std::vector<double> weights_;
};

/// Complex grid function with a boundary-condition tag. Dirichlet fields vanish
/// on boundary nodes.
class Field {
 public:
  Field(Grid grid, Boundary bc);
  /// Throws ShapeError on a size mismatch and InputError if a Dirichlet field
  /// is nonzero on the boundary.
  Field(Grid grid, Boundary bc, std::vector<cplx> values);

  /// Samples f at the nodes; Dirichlet boundary nodes are set to zero.
  static Field sample(const Grid& grid, Boundary bc,
                      const std::function<cplx(double, double)>& f);

  const Grid& grid() const { return grid_; }
  Boundary bc() const { return bc_; }
  std::span<const cplx> values() const { return values_; }
  std::span<cplx> values() { return values_; }
  std::size_t size() const { return values_.size(); }
  cplx& operator[](std::size_t i) { return values_[i]; }
  const cplx& operator[](std::size_t i) const { return values_[i]; }
  cplx& at(int i, int j = 0) { return values_[grid_.index(i, j)]; }
  const cplx& at(int i, int j = 0) const { return values_[grid_.index(i, j)]; }

  /// Zeroes Dirichlet boundary nodes.
  void enforce_boundary();

  Field& operator+=(const Field& o);
  Field& operator-=(const Field& o);
  Field& operator*=(cplx s);

 private:
  Grid grid_;
  Boundary bc_;
  std::vector<cplx> values_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(cplx s, Field a);

void require_same_grid(const Grid& a, const Grid& b);

/// Second-order centred Laplacian. Dirichlet rows on the boundary are zero;
/// Neumann boundaries use ghost-node reflection.
Field laplacian(const Field& f);

// Quadrature (composite trapezoidal rule) and norms.
double integrate(const Grid& g, std::span<const double> f);
cplx integrate(const Grid& g, std::span<const cplx> f);
/// W_p(f) = int |f|^p.
double lp_power(const Field& f, double p);
double norm_lp(const Field& f, double p);
double norm_l2(const Field& f);
double sup_norm(const Field& f);
/// ||grad f||^2 with differences centred at cell midpoints; pairs with the
/// Laplacian so that Re <Lap f, f> = -||grad f||^2 exactly.
double grad_sq(const Field& f);
double norm_h1(const Field& f);
/// int f conj(g).
cplx inner(const Field& f, const Field& g);

// ---------------------------------------------------------------------------
// Analytic eigenbases of -Lap

/// L2-normalised 1-D Dirichlet eigenfunction of index j >= 1 on (x0, x1).
/// Odd j are cosines and even j sines about the interval centre.
double dirichlet_mode_1d(int j, double x, double x0, double x1);
/// L2-normalised 1-D Neumann eigenfunction of index j >= 0 on (x0, x1).
double neumann_mode_1d(int j, double x, double x0, double x1);
/// Eigenvalue (j pi / L)^2.
double mode_eigenvalue_1d(int j, double length);

struct Mode {
  std::array<int, 2> index{};  // (i, j); j = 0 on an interval
  double mu = 0.0;             // eigenvalue of -Lap
  double norm_const = 1.0;     // amplitude of the normalised mode
  std::vector<double> values;  // node samples
};

struct EigenBasis {
  Grid grid;
  Boundary bc;
  std::vector<Mode> modes;

  std::size_t size() const { return modes.size(); }
  Field field(std::size_t m) const;
};

/// Lowest `count` analytic modes, sorted by eigenvalue (ties by index). Throws
/// AliasingError if a required mode is not resolved by the grid.
EigenBasis eigenbasis(const Grid& grid, Boundary bc, std::size_t count);

/// Largest 1-D mode index representable on n nodes.
int max_mode_index(int n);

std::vector<cplx> project(const Field& f, const EigenBasis& basis);
Field synthesize(std::span<const cplx> coeffs, const EigenBasis& basis);

}  // namespace cgl
