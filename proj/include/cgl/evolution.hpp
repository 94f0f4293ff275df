#pragma once

#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "cgl/discretization.hpp"
#include "cgl/params.hpp"

namespace cgl {

enum class Scheme { EigenbasisExponential, SemiImplicitFD };

std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& s);

struct SolverConfig {
  /// Non-positive means "use the scheme default" (see default_dt).
  double dt = 0.0;
  double t_end = 1.0;
  double blowup_threshold = 1e6;
  int diag_stride = 1;
  Scheme scheme = Scheme::EigenbasisExponential;
  /// Exponent of the logged W_p column.
  double lp_exponent = 2.0;
  /// dt may be halved at most this many times below the requested step.
  int max_halvings = 20;
  /// Bound on dt * max(k + b rho^s1 - c rho^s2)^+ per step.
  double growth_limit = 0.05;
};

/// 1e-3 for the eigenbasis scheme, 0.25 h^2 / a for the finite-difference scheme.
double default_dt(const Grid& g, const ParamSet& p, Scheme s);

struct DiagnosticsSample {
  double t = 0.0;
  double l2sq = 0.0;       // ||u||^2
  double gradsq = 0.0;     // ||grad u||^2
  double lp1 = 0.0;        // int |u|^{s1+2}
  double lp2 = 0.0;        // int |u|^{s2+2}
  double sup = 0.0;        // max |u|
  double V = 0.0;          // Lyapunov functional V(u)
  double mass_residual = 0.0;
  double wp = 0.0;         // int |u|^p, p = SolverConfig::lp_exponent
  /// Formula for dV/dt; NaN unless alpha/a = beta/b = gamma/c.
  double vdot = std::numeric_limits<double>::quiet_NaN();
};

struct DiagnosticsLog {
  double lp_exponent = 2.0;
  std::vector<DiagnosticsSample> samples;

  /// Column names in output order.
  static std::vector<std::string> columns();
};

/// Three-point finite-difference derivative of samples y(t) on a possibly
/// nonuniform increasing grid (one-sided at the ends, two-point if only two samples).
std::vector<double> time_derivative(const std::vector<double>& t, const std::vector<double>& y);

/// Diagnostics of a single field; mass_residual is left at zero.
DiagnosticsSample sample_diagnostics(const Field& u, const ParamSet& p, double t, double lp_exponent);

/// d/dt(||u||^2/2) - (-a||grad u||^2 + b int|u|^{s1+2} - c int|u|^{s2+2} + k||u||^2),
/// with the derivative taken by three-point differences of the logged values.
void fill_mass_residual(DiagnosticsLog& log, const ParamSet& p);

/// Strang splitting: linear half step for (a + i alpha) Lap, node-wise
/// polar-form step for the reaction part (including k u), linear half step.
class Stepper {
 public:
  Stepper(const Grid& grid, Boundary bc, const ParamSet& p, Scheme scheme);
  ~Stepper();
  Stepper(const Stepper&) = delete;
  Stepper& operator=(const Stepper&) = delete;

  /// One full step of length dt in place.
  void step(Field& u, double dt);
  /// exp(tau (a + i alpha) Lap) (exactly or by Crank-Nicolson / ADI).
  void linear(Field& u, double tau);
  /// Exact-in-phase RK4 solve of the node-wise reaction ODE over tau.
  void reaction(Field& u, double tau) const;

  /// max over nodes of (k + b rho^s1 - c rho^s2)^+.
  double growth_rate(const Field& u) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Single Strang step with a throwaway stepper (convenience for tests).
Field step(const Field& u, const ParamSet& p, const SolverConfig& cfg);

enum class Outcome { Completed, BlowUp, Failed };
std::string to_string(Outcome o);

struct RunResult {
  Field u;
  DiagnosticsLog log;
  Outcome outcome = Outcome::Completed;
  /// Time reached; for BlowUp the last time with a finite sup-norm below the threshold.
  double t_final = 0.0;
  long steps = 0;
  int min_dt_exponent = 0;  // deepest dt halving used
  std::string message;
};

RunResult run(const Field& u0, const ParamSet& p, const SolverConfig& cfg);

}  // namespace cgl
