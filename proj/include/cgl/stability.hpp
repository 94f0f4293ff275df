#pragma once

#include <string>
#include <vector>

#include "cgl/discretization.hpp"
#include "cgl/evolution.hpp"
#include "cgl/params.hpp"

namespace cgl {

/// W_p(u) = int |u|^p, p >= 2.
double eval_Wp(const Field& u, double p);

/// V(u) = a/2 ||grad u||^2 - b/(s1+2) int|u|^{s1+2} + c/(s2+2) int|u|^{s2+2} - k/2 ||u||^2.
double eval_V(const Field& u, const ParamSet& p);

/// -int |a Lap u + b|u|^s1 u - c|u|^s2 u + k u|^2 with the discrete Laplacian.
/// Throws HypothesisError unless alpha/a = beta/b = gamma/c.
double eval_Vdot(const Field& u, const ParamSet& p);

/// Same integral without the hypothesis check.
double vdot_integral(const Field& u, const ParamSet& p);

/// Lower bound V(u) >= M ||u||_{H^1}^2 obtained from pointwise Young's
/// inequality |u|^{s1+2} <= (s1/s2)|u|^{s2+2} + ((s2-s1)/s2)|u|^2:
///   M = min(a/2, |k|/2 - b+ (s2-s1)/((s1+2) s2)),
/// valid when k < 0, s1 < s2 and c/(s2+2) >= b+ s1/((s1+2) s2).
struct Coercivity {
  double M = 0.0;
  bool valid = false;
};
Coercivity coercivity_constant(const ParamSet& p);

enum class Functional { Lp, H1 };

struct LyapunovSample {
  double t = 0.0;
  double Wp = 0.0;
  double V = 0.0;
  double Vdot_formula = 0.0;
  double Vdot_numeric = 0.0;
};

struct LyapunovReport {
  Functional which = Functional::H1;
  double p = 2.0;
  std::vector<LyapunovSample> samples;
  bool monotone = true;
  /// Largest per-sample increase of the selected functional.
  double max_increase = 0.0;
  /// Least-squares slope of ln(functional) against t over the second half of the run.
  double decay_rate_estimate = 0.0;
};

/// Monotonicity tolerance per sample is 1e-8 (1 + |value|). For Functional::Lp
/// the log must have been recorded with lp_exponent == p.
LyapunovReport verify_decay(const DiagnosticsLog& log, Functional which, double p = 2.0);

}  // namespace cgl
