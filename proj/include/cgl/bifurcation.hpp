#pragma once

#include <array>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "cgl/discretization.hpp"
#include "cgl/params.hpp"

namespace cgl {

/// Two L2-orthonormal real Dirichlet eigenfunctions sharing the eigenvalue lambda0.
/// With `simple` set, u2 is zero and only u1 spans the kernel (alpha frozen at 0).
struct DoubleEigenpair {
  Grid grid;
  double lambda0 = 0.0;
  Field u1, u2;
  std::array<int, 2> index1{}, index2{};
  bool simple = false;
};

/// Analytic modes (i1, j1) and (i2, j2) of -Lap on a rectangle. Throws
/// InputError unless their eigenvalues coincide and the indices differ.
DoubleEigenpair make_pair(const Grid& grid, std::array<int, 2> m1, std::array<int, 2> m2);

/// Single mode treated as a one-dimensional kernel.
DoubleEigenpair make_simple(const Grid& grid, std::array<int, 2> m);

/// (-1,1)^2 with v1 = cos(pi x/2) sin(pi y), v2 = cos(pi y/2) sin(pi x), lambda0 = 5 pi^2/4.
/// `swapped` exchanges the roles of v1 and v2.
DoubleEigenpair square_pair(int n = 128, bool swapped = false);

/// max_j || Lap_h u_j + lambda0 u_j ||_{L2} over interior nodes (O(h^2)).
double eigen_residual(const DoubleEigenpair& pair);

/// int |u1 + alpha u2|^s1 (u1 + alpha u2)(alpha u1 - u2) by trapezoidal quadrature.
cplx eval_P(const DoubleEigenpair& pair, cplx alpha, double sigma1);

struct PRoot {
  cplx alpha0;
  /// dP/d(Re alpha) by central differences.
  cplx P_prime;
  /// Determinant of the real 2x2 Jacobian of (Re P, Im P) in (Re alpha, Im alpha).
  double jacobian_det = 0.0;
  bool simple = false;  // |det| > 1e-6
  double residual = 0.0;
};

/// Newton from a 9x9 grid of starts in [-2,2]^2; roots with |P| < 1e-10,
/// deduplicated and sorted by (Re, Im).
std::vector<PRoot> find_roots_P(const DoubleEigenpair& pair, double sigma1);

struct BifurcationOptions {
  std::size_t basis_size = 400;
  /// Permit sigma1 < 1, where the Lipschitz estimates are not available.
  bool allow_small_sigma1 = false;
  double picard_tol = 1e-12;
  int picard_max = 200;
  double contraction_limit = 0.9;
  double newton_tol = 1e-10;
  int newton_max = 50;
  double fd_step = 1e-6;
};

struct YSolution {
  std::vector<cplx> coeffs;  // over the complement modes
  int iterations = 0;
  double max_ratio = 0.0;  // largest ratio of successive differences
};

struct BranchPoint {
  double eps = 0.0;
  cplx alpha;
  cplx lambda;
  std::vector<cplx> y_coeffs;
  double y_h1 = 0.0;
  double residual = 0.0;  // Galerkin norm of lambda u - L u + M u
  double outer_residual = 0.0;
  int newton_iterations = 0;
};

struct Branch {
  cplx alpha0;
  std::vector<BranchPoint> points;
  double lipschitz_lambda = 0.0;  // max |d lambda| / d eps
  double lipschitz_alpha = 0.0;
  bool truncated = false;
  std::string message;
};

struct AsymptoticReport {
  cplx coefficient_quadrature;  // e^{i gamma1} int |u1 + a0 u2|^s1 (u1 + a0 u2) u1
  cplx coefficient_fit;         // extrapolation of -(lambda - e^{i theta} lambda0)/eps^s1
  double relative_deviation = 0.0;
  double correction_exponent = 0.0;
  double fit_exponent = 0.0;  // log-log slope of |lambda - e^{i theta} lambda0|
  int points_used = 0;
};

/// Lyapunov-Schmidt solver for lambda u - L u + M u = 0 near e^{i theta} lambda0,
/// L = -e^{i theta} Lap, M u = e^{i g1}|u|^s1 u + chi e^{i g2}|u|^s2 u.
class BifurcationProblem {
 public:
  BifurcationProblem(DoubleEigenpair pair, TrigParamSet trig, BifurcationOptions opts = {});
  ~BifurcationProblem();
  BifurcationProblem(BifurcationProblem&&) noexcept;
  BifurcationProblem& operator=(BifurcationProblem&&) noexcept;

  const DoubleEigenpair& pair() const;
  const TrigParamSet& trig() const;
  const BifurcationOptions& options() const;

  std::size_t complement_size() const;
  const std::vector<std::array<int, 2>>& complement_indices() const;
  const std::vector<double>& complement_mu() const;
  /// Half the distance from lambda0 to the nearest distinct Galerkin eigenvalue.
  double resolvent_radius() const;

  /// Picard iteration for y = (lambda - PL)^{-1}[-P M(y + eps u1 + eps alpha u2)].
  YSolution solve_y(double eps, cplx alpha, cplx lambda) const;

  /// (G1, G2): the lambda equation along u1 and the alpha equation, the latter
  /// divided by eps^{s1+1}. `y` receives the inner solution.
  std::array<cplx, 2> outer_residual(double eps, cplx alpha, cplx lambda, YSolution* y = nullptr) const;

  BranchPoint solve_point(double eps, cplx alpha_init, cplx lambda_init) const;
  Branch continue_branch(cplx alpha0, const std::vector<double>& eps_grid) const;

  Field synthesize_y(const std::vector<cplx>& coeffs) const;
  Field assemble(const BranchPoint& pt) const;
  double y_h1(const std::vector<cplx>& coeffs) const;

  /// Galerkin L2 norm of lambda u - L u + M u over the full basis.
  double galerkin_residual(const Field& u, cplx lambda) const;
  /// Grid L2 norm of lambda u + e^{i theta} Lap_h u + M u over interior nodes.
  double grid_residual(const Field& u, cplx lambda) const;
  /// e^{i theta} lambda0 - (M u, u1)/(u, u1); unchanged under u -> e^{i phi} u.
  cplx lambda_from_field(const Field& u) const;

  /// e^{i g1} int |u1 + a u2|^s1 (u1 + a u2) u1.
  cplx leading_coefficient(cplx alpha0) const;

  Field apply_M(const Field& u) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Thin wrappers building a BifurcationProblem with the given basis size.
std::vector<cplx> solve_y_fixed_point(const DoubleEigenpair& pair, const TrigParamSet& trig, double eps,
                                      cplx alpha, cplx lambda, std::size_t basis_size);
BranchPoint solve_branch_point(const DoubleEigenpair& pair, const TrigParamSet& trig, double eps,
                               cplx alpha_init, cplx lambda_init, std::size_t basis_size = 400);
Branch continue_branch(const DoubleEigenpair& pair, const TrigParamSet& trig, cplx alpha0,
                       const std::vector<double>& eps_grid, std::size_t basis_size = 400);

/// Fits -(lambda - e^{i theta} lambda0)/eps^s1 = C + D eps^q over points with
/// 0 < eps <= eps_max, q = min(s1, s2 - s1), and compares C with the quadrature value.
AsymptoticReport asymptotic_check(const Branch& branch, const DoubleEigenpair& pair, const TrigParamSet& trig,
                                  double eps_max = std::numeric_limits<double>::infinity());

}  // namespace cgl
