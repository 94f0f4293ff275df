#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "cgl/discretization.hpp"

namespace cgl {

/// Data of a standing wave u = e^{i omega t} phi(x) on the real line for
///   u_t = e^{i theta} u'' + e^{i gamma1}|u|^s1 u + chi e^{i gamma2}|u|^s2 u + k u.
struct BoundStateSpec {
  double theta = 0.0;
  double omega = 1.0;
  double k = 0.0;
  double sigma1 = 2.0;
  double sigma2 = 4.0;
  int chi = 1;

  /// Throws InputError for malformed values and HypothesisError when
  /// omega cos(theta) + k sin(theta) == 0.
  void validate() const;
};

struct NlsCoeffs {
  double d = 0.0;
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  double epsilon = 0.0;
  double eta1 = 0.0;
  double eta2 = 0.0;
  /// Largest discrepancy between the two equivalent eta formulas.
  double eta_crosscheck = 0.0;
};

double compute_d(const BoundStateSpec& spec);
/// theta + atan2(d(s+4), s+2-2d^2), wrapped to (-pi, pi].
double compute_gamma(double d, double theta, double sigma);
/// (s+2)/sqrt(N^2 + D^2) with N = d(s+4), D = s+2-2d^2.
double eta_closed_form(double d, double sigma);
/// (d sin(gamma-theta) + cos(gamma-theta))/(1+d^2).
double eta_from_angles(double d, double theta, double gamma);
NlsCoeffs compute_coeffs(const BoundStateSpec& spec);

/// F(z) = -eps z^2/2 + eta1 z^{s1+2}/(s1+2) + chi eta2 z^{s2+2}/(s2+2).
double nls_potential(double z, double eps, double eta1, double eta2, int chi, double s1,
                     double s2);
/// Smallest z > 0 with F(z) = 0 (log-spaced sign scan, then bisection).
std::optional<double> first_positive_root(double eps, double eta1, double eta2, int chi,
                                          double s1, double s2);

struct Admissibility {
  bool root_found = false;
  bool admissible = false;
  double z0 = 0.0;
  /// s1 eta1 z0^s1/(s1+2) - s2 eta2 z0^s2/(s2+2); admissible iff > 0.
  double value = 0.0;
  std::string note;
};

Admissibility admissibility_chi_minus(double eps, double eta1, double eta2, double s1, double s2);
Admissibility admissibility_chi_minus(const NlsCoeffs& c, double s1, double s2);

/// Real even profile of psi'' = eps psi - eta1 psi^{s1+1} - chi eta2 psi^{s2+1} on [-L, L].
struct Profile {
  Grid grid;
  std::vector<double> psi;
  std::vector<double> dpsi;
  double x0 = 0.0;  // first positive root of F, the exact peak value
  double half_width = 0.0;
  int steps = 0;  // RK4 steps on [0, L]
  double eps = 0.0, eta1 = 0.0, eta2 = 0.0;
  int chi = 1;
  double sigma1 = 0.0, sigma2 = 0.0;
  /// |psi(0) - x0| of the computed profile.
  double peak_error = 0.0;
  /// Max difference against the run with half the step.
  double richardson_error = 0.0;
};

/// max(20, 25/sqrt(eps)).
double default_half_width(double eps);

/// Shooting along the decaying manifold from x = L towards the turning point at
/// x = 0, RK4 with h = L/n, mirrored to [-L, 0]. Throws HypothesisError when F
/// has no positive root or the chi = -1 admissibility test fails, and
/// NumericalError when the step-halved rerun disagrees by more than
/// 1e-6 max psi.
Profile solve_profile(const NlsCoeffs& coeffs, int chi, double sigma1, double sigma2, double L,
                      int n);

/// H = psi'^2 - eps psi^2 + 2 eta1 psi^{s1+2}/(s1+2) + 2 chi eta2 psi^{s2+2}/(s2+2) per node.
std::vector<double> first_integral(const Profile& p);

/// Slope of ln psi over the last decade of the tail (expected -sqrt(eps)).
double tail_decay_rate(const Profile& p);

struct BoundState {
  Grid grid;
  std::vector<cplx> phi;
  NlsCoeffs coeffs;
};

/// phi = psi exp(i d ln psi), with phi = 0 where psi < 1e-300.
BoundState assemble(const Profile& profile, const NlsCoeffs& coeffs);

/// Discrete L2 norm, over interior nodes, of
///   e^{i theta} phi'' + e^{i gamma1}|phi|^s1 phi + chi e^{i gamma2}|phi|^s2 phi + (k - i omega) phi.
double residual_bs(const BoundState& bs, const BoundStateSpec& spec);

}  // namespace cgl
