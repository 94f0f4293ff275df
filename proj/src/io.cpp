#include "cgl/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "cgl/errors.hpp"

namespace cgl {

namespace {

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

std::string fmt_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string CsvTable::str() const {
  std::string s;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) s += ',';
    s += columns[i];
  }
  s += '\n';
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) s += ',';
      s += fmt_double(r[i]);
    }
    s += '\n';
  }
  return s;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw InputError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot open " + path.string() + " for writing");
  f << text;
  if (!f) throw InputError("write to " + path.string() + " failed");
}

void write_json(const std::filesystem::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

void write_csv(const std::filesystem::path& path, const CsvTable& t) { write_text(path, t.str()); }

json complex_json(cplx z) { return json{{"re", num(z.real())}, {"im", num(z.imag())}}; }

json to_json(const ParamSet& p) {
  return json{{"a", p.a},         {"alpha", p.alpha}, {"b", p.b},           {"beta", p.beta},        {"c", p.c},
              {"gamma", p.gamma}, {"k", p.k},         {"sigma1", p.sigma1}, {"sigma2", p.sigma2}};
}

json to_json(const TrigParamSet& t) {
  return json{{"theta", t.theta}, {"gamma1", t.gamma1}, {"gamma2", t.gamma2}, {"chi", t.chi},
              {"k", t.k},         {"sigma1", t.sigma1}, {"sigma2", t.sigma2}};
}

json to_json(const Condition& c) {
  return json{{"name", c.name},
              {"lhs", num(c.lhs)},
              {"rhs", num(c.rhs)},
              {"relation", to_string(c.relation)},
              {"satisfied", c.satisfied},
              {"on_boundary", c.on_boundary}};
}

json to_json(const BranchReport& b) {
  json conds = json::array();
  for (const auto& c : b.conditions) conds.push_back(to_json(c));
  return json{{"evaluated", b.evaluated}, {"satisfied", b.satisfied}, {"conditions", conds}, {"note", b.note}};
}

json to_json(const RegimeReport& r) {
  return json{{"lp_exponent", r.lp_exponent},
              {"dimension", r.dimension},
              {"domain_volume", r.domain_volume ? json(*r.domain_volume) : json(nullptr)},
              {"global_existence", to_json(r.global_existence)},
              {"lp_stable", to_json(r.lp_stable)},
              {"lp_asymptotically_stable", to_json(r.lp_asymptotically_stable)},
              {"l2_bounded_domain", to_json(r.l2_bounded_domain)},
              {"h1_k_negative", to_json(r.h1_k_negative)},
              {"h1_k_zero_bounded", to_json(r.h1_k_zero_bounded)},
              {"h1_stable", r.h1_stable()},
              {"blow_up_admissible", to_json(r.blow_up_admissible)},
              {"periodic_orbit", to_json(r.periodic_orbit)},
              {"periodic_orbit_case", to_string(r.periodic_orbit_case)}};
}

json to_json(const NlsCoeffs& c) {
  return json{{"d", c.d},       {"gamma1", c.gamma1}, {"gamma2", c.gamma2},
              {"epsilon", c.epsilon}, {"eta1", c.eta1},   {"eta2", c.eta2},
              {"eta_crosscheck", c.eta_crosscheck}};
}

json to_json(const Admissibility& a) {
  return json{{"root_found", a.root_found}, {"admissible", a.admissible}, {"z0", num(a.z0)},
              {"value", num(a.value)},      {"note", a.note}};
}

json to_json(const LyapunovReport& r) {
  return json{{"functional", r.which == Functional::H1 ? "V" : "W_p"},
              {"p", r.p},
              {"monotone", r.monotone},
              {"max_increase", num(r.max_increase)},
              {"decay_rate_estimate", num(r.decay_rate_estimate)},
              {"samples", r.samples.size()}};
}

json to_json(const MonodromyReport& r) {
  json entries = json::array();
  for (const auto& e : r.entries) {
    entries.push_back(json{{"mu_delta", e.mono.mu_delta},
                           {"multipliers", {complex_json(e.mono.multipliers[0]), complex_json(e.mono.multipliers[1])}},
                           {"log_abs", {num(e.mono.log_abs[0]), num(e.mono.log_abs[1])}},
                           {"log_det", num(e.mono.log_det)},
                           {"product_error", num(e.product_error)},
                           {"steps", e.mono.steps},
                           {"trivial_index", e.trivial_index}});
  }
  return json{{"verdict", to_string(r.verdict)},
              {"reason", r.reason},
              {"log_margin", num(r.log_margin)},
              {"margin", num(r.margin)},
              {"trivial_error", num(r.trivial_error)},
              {"mu_cutoff", num(r.mu_cutoff)},
              {"radial_coefficient", num(r.radial_coefficient)},
              {"entries", entries}};
}

json to_json(const PRoot& r) {
  return json{{"alpha0", complex_json(r.alpha0)},
              {"P_prime", complex_json(r.P_prime)},
              {"jacobian_det", r.jacobian_det},
              {"simple", r.simple},
              {"residual", r.residual}};
}

json to_json(const AsymptoticReport& r) {
  return json{{"coefficient_quadrature", complex_json(r.coefficient_quadrature)},
              {"coefficient_fit", complex_json(r.coefficient_fit)},
              {"relative_deviation", num(r.relative_deviation)},
              {"correction_exponent", r.correction_exponent},
              {"fit_exponent", num(r.fit_exponent)},
              {"points_used", r.points_used}};
}

json to_json(const Branch& b) {
  double max_res = 0.0;
  for (const auto& p : b.points) max_res = std::max(max_res, p.residual);
  return json{{"alpha0", complex_json(b.alpha0)},
              {"points", b.points.size()},
              {"lipschitz_lambda", num(b.lipschitz_lambda)},
              {"lipschitz_alpha", num(b.lipschitz_alpha)},
              {"max_residual", num(max_res)},
              {"truncated", b.truncated},
              {"message", b.message}};
}

CsvTable profile_table(const Profile& p, const BoundState& bs) {
  CsvTable t{{"x", "psi", "dpsi", "re_phi", "im_phi", "H"}, {}};
  const auto h = first_integral(p);
  for (int i = 0; i < p.grid.nx(); ++i)
    t.rows.push_back({p.grid.x(i), p.psi[i], p.dpsi[i], bs.phi[i].real(), bs.phi[i].imag(), h[i]});
  return t;
}

CsvTable diagnostics_table(const DiagnosticsLog& log) {
  CsvTable t{DiagnosticsLog::columns(), {}};
  for (const auto& s : log.samples)
    t.rows.push_back({s.t, s.l2sq, s.gradsq, s.lp1, s.lp2, s.sup, s.V, s.mass_residual, s.wp, s.vdot});
  return t;
}

CsvTable field_table(const Field& f) {
  CsvTable t{{"x", "y", "re", "im", "abs"}, {}};
  const Grid& g = f.grid();
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) {
      const cplx z = f.at(i, j);
      t.rows.push_back({g.x(i), g.y(j), z.real(), z.imag(), std::abs(z)});
    }
  return t;
}

CsvTable multiplier_table(const MonodromyReport& r) {
  CsvTable t{{"mu_delta", "re_m1", "im_m1", "re_m2", "im_m2", "log_abs1", "log_abs2", "log_det", "product_error"}, {}};
  for (const auto& e : r.entries) {
    const auto& m = e.mono;
    t.rows.push_back({m.mu_delta, m.multipliers[0].real(), m.multipliers[0].imag(), m.multipliers[1].real(),
                      m.multipliers[1].imag(), m.log_abs[0], m.log_abs[1], m.log_det, e.product_error});
  }
  return t;
}

CsvTable branch_table(const Branch& b) {
  CsvTable t{{"eps", "re_lambda", "im_lambda", "re_alpha", "im_alpha", "y_h1", "residual"}, {}};
  for (const auto& p : b.points)
    t.rows.push_back({p.eps, p.lambda.real(), p.lambda.imag(), p.alpha.real(), p.alpha.imag(), p.y_h1, p.residual});
  return t;
}

}  // namespace cgl
