#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace cgl {

class Field;

/// Coefficients of
///   u_t = (a + i alpha) Lap u + (b + i beta)|u|^s1 u - (c + i gamma)|u|^s2 u + k u.
struct ParamSet {
  double a = 1.0;
  double alpha = 0.0;
  double b = 0.0;
  double beta = 0.0;
  double c = 0.0;
  double gamma = 0.0;
  double k = 0.0;
  double sigma1 = 1.0;
  double sigma2 = 2.0;

  /// Throws InputError unless a > 0, sigma1 > 0, sigma2 > 0 and all entries are finite.
  void validate() const;
};

/// Unit-modulus normal form
///   u_t = e^{i theta} Lap u + e^{i gamma1}|u|^s1 u + chi e^{i gamma2}|u|^s2 u + k u.
struct TrigParamSet {
  double theta = 0.0;
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  int chi = 1;
  double k = 0.0;
  double sigma1 = 1.0;
  double sigma2 = 2.0;

  void validate() const;
};

struct TrigForm {
  TrigParamSet trig;
  /// |a + i alpha|, |b + i beta|, |c + i gamma|.
  std::array<double, 3> moduli{};
  /// The raw equation coincides with the normal form only when every modulus is 1.
  bool exact_equivalence = false;
};

/// Throws HypothesisError when (b, beta) or (c, gamma) vanishes.
TrigForm to_trig_form(const ParamSet& p);

/// Inverse of to_trig_form given the reported moduli.
ParamSet from_trig_form(const TrigParamSet& t, const std::array<double, 3>& moduli);

/// Wrap an angle into (-pi, pi].
double wrap_angle(double angle);

// ---------------------------------------------------------------------------
// Regime classification

enum class Relation { Less, LessEqual, Greater, GreaterEqual, Equal, NotEqual, ApproxEqual };

std::string to_string(Relation r);

/// One named inequality: satisfied == (lhs relation rhs).
struct Condition {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  Relation relation = Relation::LessEqual;
  bool satisfied = false;
  /// For non-strict relations: true when satisfied with equality.
  bool on_boundary = false;
};

Condition make_condition(std::string name, double lhs, Relation rel, double rhs,
                         double rel_tol = 1e-12);

struct BranchReport {
  bool evaluated = true;
  bool satisfied = false;
  std::vector<Condition> conditions;
  std::string note;

  const Condition* find(const std::string& name) const;
};

enum class PeriodicCase { None, Case1_c0, Case2_k0 };

std::string to_string(PeriodicCase c);

struct RegimeReport {
  double lp_exponent = 2.0;
  int dimension = 1;
  std::optional<double> domain_volume;

  BranchReport global_existence;
  BranchReport lp_stable;
  BranchReport lp_asymptotically_stable;
  /// p = 2 on a bounded domain with k > 0.
  BranchReport l2_bounded_domain;
  BranchReport h1_k_negative;
  BranchReport h1_k_zero_bounded;
  BranchReport blow_up_admissible;
  BranchReport periodic_orbit;
  PeriodicCase periodic_orbit_case = PeriodicCase::None;

  bool h1_stable() const { return h1_k_negative.satisfied || h1_k_zero_bounded.satisfied; }
};

struct ClassifyOptions {
  int dimension = 1;
  std::optional<double> domain_volume;
  double lp_exponent = 2.0;
  /// Evaluate the bounded-domain branches; defaults to "a volume was supplied".
  std::optional<bool> bounded_domain;
};

RegimeReport classify(const ParamSet& p, const ClassifyOptions& opts = {});

/// Volume of the unit ball in R^N.
double unit_ball_volume(int dimension);

/// (|Omega| / omega_N)^{-2/N}, the Poincare factor used by the bounded-domain branches.
double poincare_factor(double domain_volume, int dimension);

/// alpha/a = beta/b = gamma/c with relative tolerance; ratios with a vanishing
/// denominator (b = 0 or c = 0) are dropped.
BranchReport proportionality(const ParamSet& p, double rel_tol = 1e-12);

// ---------------------------------------------------------------------------
// Blow-up energy

struct BlowupEnergy {
  double energy = 0.0;
  /// k >= 0 and (nu <= 0 or sigma2 <= sigma1).
  bool hypotheses_hold = false;
};

/// E(u0) = int( |grad u0|^2 / 2 - |u0|^{s1+2}/(s1+2) + nu |u0|^{s2+2}/(s2+2) ).
BlowupEnergy blowup_energy(const Field& u0, double theta, double nu, double sigma1,
                           double sigma2, double k = 0.0);

/// Raw coefficients of u_t = e^{i theta}[Lap u + |u|^s1 u - nu |u|^s2 u] + k u.
ParamSet blowup_params(double theta, double nu, double sigma1, double sigma2, double k);

// ---------------------------------------------------------------------------
// Spatially homogeneous periodic orbits

struct OrbitParams {
  double r0 = 0.0;
  double freq = 0.0;
  /// +infinity when freq == 0.
  double period = 0.0;
  bool degenerate = false;
  PeriodicCase which = PeriodicCase::None;
};

/// Circle |u| = r0 solving b r0^s1 - c r0^s2 + k = 0, or nullopt outside cases 1 and 2.
std::optional<OrbitParams> periodic_orbit_params(const ParamSet& p);

}  // namespace cgl
