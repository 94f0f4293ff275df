#pragma once

#include <array>
#include <complex>
#include <string>
#include <vector>

#include "cgl/discretization.hpp"
#include "cgl/params.hpp"

namespace cgl {

using Mat2 = std::array<std::array<double, 2>, 2>;

/// Spatially homogeneous orbit theta(t) = r0 exp(i freq t) of the Neumann problem.
struct PeriodicOrbit {
  double r0 = 0.0;
  double freq = 0.0;
  double period = 0.0;
  PeriodicCase which = PeriodicCase::None;
  ParamSet params;
};

/// Throws HypothesisError outside cases 1 and 2 or when freq == 0.
PeriodicOrbit build_orbit(const ParamSet& p);

/// Real 2x2 matrix of v -> B(t) v, the linearisation of
/// (b + i beta)|u|^s1 u - (c + i gamma)|u|^s2 u at theta(t), acting on (Re v, Im v).
/// The driving term k is not part of B.
Mat2 assemble_B(const PeriodicOrbit& orbit, double t);

struct Monodromy {
  double mu_delta = 0.0;
  std::complex<double> lambda;  // (a + i alpha) mu_delta
  /// Period map of w' = (J + B + k I) w, with J the rotation part of -lambda;
  /// the full monodromy is exp(log_scale) * matrix.
  Mat2 matrix{};
  double log_scale = 0.0;  // -a mu_delta T plus the normalisation of matrix
  std::array<std::complex<double>, 2> multipliers;
  std::array<double, 2> log_abs{};  // ln |multiplier|
  double log_det = 0.0;
  int steps = 0;
  double step_doubling_error = 0.0;
};

/// RK4 with 4096 steps, doubled until the step-doubling difference is below 1e-10.
/// Throws NumericalError if that fails at 2^20 steps.
Monodromy monodromy(const PeriodicOrbit& orbit, double mu_delta, int steps = 4096);

/// Expected log det: T (Tr B + 2k - 2 a mu_delta).
double expected_log_det(const PeriodicOrbit& orbit, double mu_delta);

/// |log det - expected| / max(1, |log det|).
double product_check(const PeriodicOrbit& orbit, double mu_delta, const Monodromy& m);

enum class Verdict { OrbitallyStable, Unstable, Inconclusive };
std::string to_string(Verdict v);

struct MonodromyEntry {
  Monodromy mono;
  double product_error = 0.0;
  bool has_trivial = false;  // mu_delta = 0 entry carries the unit multiplier
  int trivial_index = -1;
};

struct MonodromyReport {
  std::vector<MonodromyEntry> entries;
  Verdict verdict = Verdict::Inconclusive;
  /// Largest nontrivial multiplier modulus, as a logarithm.
  double log_margin = 0.0;
  double margin = 0.0;
  /// |trivial multiplier - 1| at mu_delta = 0.
  double trivial_error = 0.0;
  /// Eigenvalues above this are certified to give multipliers below 1/2.
  double mu_cutoff = 0.0;
  /// sigma1 b r0^s1 (case 1) or -c (s2 - s1) r0^s2 (case 2).
  double radial_coefficient = 0.0;
  std::string reason;
};

/// Neumann eigenvalues of -Lap on an interval or rectangle, ascending, up to mu_max.
std::vector<double> neumann_spectrum(const Grid& domain, double mu_max, std::size_t max_count);

MonodromyReport stability_verdict(const PeriodicOrbit& orbit, const Grid& domain, int steps = 4096);

/// Radial ODE d rho/dt = rho (k + b rho^s1 - c rho^s2) from r0 + 1/n until rho > 1e8.
/// Throws HypothesisError on the stable branches.
double instability_blowup_demo(const PeriodicOrbit& orbit, int n);

}  // namespace cgl
