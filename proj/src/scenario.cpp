#include "cgl/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <thread>

#include "cgl/bifurcation.hpp"
#include "cgl/errors.hpp"
#include "cgl/floquet.hpp"
#include "cgl/stability.hpp"

namespace cgl {

namespace fs = std::filesystem;

std::string to_string(Command c) {
  switch (c) {
    case Command::Classify: return "classify";
    case Command::BoundState: return "boundstate";
    case Command::Simulate: return "simulate";
    case Command::Floquet: return "floquet";
    case Command::Bifurcate: return "bifurcate";
    case Command::BlowupDemo: return "blowup-demo";
  }
  return "classify";
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"classify", "boundstate", "simulate", "floquet", "bifurcate", "blowup-demo"};
  return names;
}

Command command_from_string(const std::string& s) {
  static const Command all[] = {Command::Classify, Command::BoundState, Command::Simulate,
                                Command::Floquet,  Command::Bifurcate,  Command::BlowupDemo};
  for (Command c : all)
    if (to_string(c) == s) return c;
  throw InputError("unknown command '" + s + "'");
}

const std::vector<KeySpec>& config_keys() {
  static const std::vector<KeySpec> keys{
      {"command", KeyKind::String, "classify | boundstate | simulate | floquet | bifurcate | blowup-demo"},
      {"a", KeyKind::Number, "diffusion coefficient, real part"},
      {"alpha", KeyKind::Number, "diffusion coefficient, imaginary part"},
      {"b", KeyKind::Number, "focusing coefficient, real part"},
      {"beta", KeyKind::Number, "focusing coefficient, imaginary part"},
      {"c", KeyKind::Number, "damping coefficient, real part"},
      {"gamma", KeyKind::Number, "damping coefficient, imaginary part"},
      {"k", KeyKind::Number, "linear driving coefficient"},
      {"sigma1", KeyKind::Number, "focusing power"},
      {"sigma2", KeyKind::Number, "damping power"},
      {"theta", KeyKind::Number, "phase of the diffusion term"},
      {"omega", KeyKind::Number, "bound-state frequency"},
      {"chi", KeyKind::Integer, "sign of the second nonlinearity (+1 or -1)"},
      {"gamma1", KeyKind::Number, "phase of the first nonlinearity"},
      {"gamma2", KeyKind::Number, "phase of the second nonlinearity"},
      {"nu", KeyKind::Number, "coefficient of the higher power in the blow-up demo"},
      {"domain", KeyKind::String, "interval | rectangle"},
      {"x0", KeyKind::Number, "domain left end"},
      {"x1", KeyKind::Number, "domain right end"},
      {"y0", KeyKind::Number, "domain bottom end"},
      {"y1", KeyKind::Number, "domain top end"},
      {"nx", KeyKind::Integer, "nodes in x (including endpoints)"},
      {"ny", KeyKind::Integer, "nodes in y (including endpoints)"},
      {"bc", KeyKind::String, "dirichlet | neumann"},
      {"dimension", KeyKind::Integer, "space dimension used by classify"},
      {"domain_volume", KeyKind::Number, "domain volume used by classify (bounded domain)"},
      {"lp_exponent", KeyKind::Number, "exponent p of the W_p functional"},
      {"L", KeyKind::Number, "bound-state half width"},
      {"n", KeyKind::Integer, "bound-state RK4 steps on [0, L]"},
      {"dt", KeyKind::Number, "time step (<= 0 selects the scheme default)"},
      {"t_end", KeyKind::Number, "final time"},
      {"blowup_threshold", KeyKind::Number, "sup-norm declared as blow-up"},
      {"diag_stride", KeyKind::Integer, "steps between diagnostics samples"},
      {"scheme", KeyKind::String, "eigenbasis | semi-implicit-fd"},
      {"initial", KeyKind::String, "random | mode | sine"},
      {"amplitude", KeyKind::Number, "initial amplitude (H1 norm for random)"},
      {"seed", KeyKind::Integer, "seed of the random initial field"},
      {"steps", KeyKind::Integer, "RK4 steps per period for the monodromy"},
      {"escape_n", KeyKind::Integer, "perturbation 1/n of the escape demonstration"},
      {"basis_size", KeyKind::Integer, "Galerkin modes"},
      {"eps_max", KeyKind::Number, "largest branch amplitude"},
      {"eps_count", KeyKind::Integer, "branch points including eps = 0"},
      {"mode1", KeyKind::IntPair, "first eigenfunction indices i,j"},
      {"mode2", KeyKind::IntPair, "second eigenfunction indices i,j"},
      {"allow_small_sigma1", KeyKind::Bool, "permit sigma1 < 1 in bifurcate"},
      {"out", KeyKind::String, "output directory"},
  };
  return keys;
}

namespace {

const KeySpec* find_key(const std::string& name) {
  for (const auto& k : config_keys())
    if (name == k.name) return &k;
  return nullptr;
}

void check_type(const std::string& key, const json& v) {
  const KeySpec* spec = find_key(key);
  if (!spec) throw InputError("unknown key '" + key + "'");
  bool ok = false;
  switch (spec->kind) {
    case KeyKind::Number: ok = v.is_number(); break;
    case KeyKind::Integer: ok = v.is_number_integer(); break;
    case KeyKind::String: ok = v.is_string(); break;
    case KeyKind::Bool: ok = v.is_boolean(); break;
    case KeyKind::IntPair: ok = v.is_array() && v.size() == 2 && v[0].is_number_integer() && v[1].is_number_integer(); break;
  }
  if (!ok) throw InputError("key '" + key + "' has the wrong type");
}

double num(const json& c, const char* key, double def) { return c.contains(key) ? c.at(key).get<double>() : def; }
long long integer(const json& c, const char* key, long long def) {
  return c.contains(key) ? c.at(key).get<long long>() : def;
}
std::string str(const json& c, const char* key, const std::string& def) {
  return c.contains(key) ? c.at(key).get<std::string>() : def;
}

void require(const json& c, const std::vector<const char*>& keys, Command cmd) {
  for (const char* k : keys)
    if (!c.contains(k)) throw InputError("missing required key '" + std::string(k) + "' for " + to_string(cmd));
}

int positive_int(const json& c, const char* key, long long def) {
  const long long v = integer(c, key, def);
  if (v < 1 || v > 100000000) throw InputError("key '" + std::string(key) + "' must be a positive integer");
  return static_cast<int>(v);
}

json report_header(const Scenario& s) {
  return json{{"spec_version", kSpecVersion}, {"command", to_string(s.command)}, {"config", s.config}};
}

}  // namespace

json parse_override(const std::string& key, const std::string& value) {
  const KeySpec* spec = find_key(key);
  if (!spec) throw InputError("unknown key '" + key + "'");
  auto bad = [&] { return InputError("cannot parse value '" + value + "' for key '" + key + "'"); };
  try {
    std::size_t pos = 0;
    switch (spec->kind) {
      case KeyKind::Number: {
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw bad();
        return v;
      }
      case KeyKind::Integer: {
        const long long v = std::stoll(value, &pos);
        if (pos != value.size()) throw bad();
        return v;
      }
      case KeyKind::String: return value;
      case KeyKind::Bool:
        if (value == "true" || value == "1") return true;
        if (value == "false" || value == "0") return false;
        throw bad();
      case KeyKind::IntPair: {
        const auto comma = value.find(',');
        if (comma == std::string::npos) throw bad();
        const std::string a = value.substr(0, comma), b = value.substr(comma + 1);
        std::size_t pa = 0, pb = 0;
        const long long i = std::stoll(a, &pa), j = std::stoll(b, &pb);
        if (pa != a.size() || pb != b.size()) throw bad();
        return json::array({i, j});
      }
    }
  } catch (const std::invalid_argument&) {
    throw bad();
  } catch (const std::out_of_range&) {
    throw bad();
  }
  throw bad();
}

json merge_config(json base, const json& overrides) {
  if (!base.is_object()) throw InputError("configuration must be a JSON object");
  for (auto it = overrides.begin(); it != overrides.end(); ++it) base[it.key()] = it.value();
  return base;
}

json load_json_file(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw InputError("cannot read config file " + path.string());
  try {
    return json::parse(f);
  } catch (const json::parse_error& e) {
    throw InputError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

Scenario parse_config(const json& config) {
  if (!config.is_object()) throw InputError("configuration must be a JSON object");
  for (auto it = config.begin(); it != config.end(); ++it) check_type(it.key(), it.value());
  if (!config.contains("command")) throw InputError("missing required key 'command'");

  Scenario s;
  s.command = command_from_string(config.at("command").get<std::string>());
  s.config = config;
  json& c = s.config;
  s.out = str(c, "out", "out");

  const std::vector<const char*> raw{"a", "alpha", "b", "beta", "c", "gamma", "k", "sigma1", "sigma2"};
  switch (s.command) {
    case Command::Classify:
    case Command::Simulate:
    case Command::Floquet: require(c, raw, s.command); break;
    case Command::BoundState: require(c, {"theta", "omega", "k", "sigma1", "sigma2", "chi"}, s.command); break;
    case Command::Bifurcate: require(c, {"theta", "gamma1", "gamma2", "chi", "sigma1", "sigma2"}, s.command); break;
    case Command::BlowupDemo: break;
  }

  if (s.command == Command::Classify || s.command == Command::Simulate || s.command == Command::Floquet) {
    s.params = ParamSet{num(c, "a", 1), num(c, "alpha", 0), num(c, "b", 0), num(c, "beta", 0), num(c, "c", 0),
                        num(c, "gamma", 0), num(c, "k", 0), num(c, "sigma1", 1), num(c, "sigma2", 2)};
    s.params.validate();
  }
  if (s.command == Command::BlowupDemo) {
    // Defaults reproduce the classical negative-energy example.
    const std::map<std::string, double> def{{"theta", 0.0}, {"nu", 0.0}, {"sigma1", 2.0}, {"sigma2", 4.0}, {"k", 0.0}};
    for (const auto& [k, v] : def)
      if (!c.contains(k)) c[k] = v;
    s.params = blowup_params(num(c, "theta", 0), num(c, "nu", 0), num(c, "sigma1", 2), num(c, "sigma2", 4), num(c, "k", 0));
  }
  if (s.command == Command::BoundState) {
    s.boundstate = BoundStateSpec{num(c, "theta", 0), num(c, "omega", 1), num(c, "k", 0), num(c, "sigma1", 2),
                                  num(c, "sigma2", 4), static_cast<int>(integer(c, "chi", 1))};
    s.boundstate.validate();
  }
  if (s.command == Command::Bifurcate) {
    s.trig.theta = num(c, "theta", 0);
    s.trig.gamma1 = num(c, "gamma1", 0);
    s.trig.gamma2 = num(c, "gamma2", 0);
    s.trig.chi = static_cast<int>(integer(c, "chi", 1));
    s.trig.sigma1 = num(c, "sigma1", 2);
    s.trig.sigma2 = num(c, "sigma2", 4);
    s.trig.validate();
  }

  // Domain and grid.
  const bool rect_default = s.command == Command::Bifurcate;
  const std::string domain = str(c, "domain", rect_default ? "rectangle" : "interval");
  if (domain != "interval" && domain != "rectangle") throw InputError("domain must be 'interval' or 'rectangle'");
  c["domain"] = domain;
  const double lo = rect_default ? -1.0 : 0.0;
  const double x0 = num(c, "x0", lo), x1 = num(c, "x1", 1.0);
  const int default_n = s.command == Command::Bifurcate ? 128 : (s.command == Command::BlowupDemo ? 257 : 129);
  const int nx = positive_int(c, "nx", domain == "rectangle" && !rect_default ? 65 : default_n);
  if (!(x1 > x0)) throw InputError("need x1 > x0");
  if (domain == "rectangle") {
    const double y0 = num(c, "y0", lo), y1 = num(c, "y1", 1.0);
    const int ny = positive_int(c, "ny", nx);
    if (!(y1 > y0)) throw InputError("need y1 > y0");
    if (nx < 3 || ny < 3) throw InputError("grids need at least 3 nodes per direction");
    s.grid = Grid::rectangle(x0, x1, y0, y1, nx, ny);
  } else {
    if (nx < 3) throw InputError("grids need at least 3 nodes");
    s.grid = Grid::interval(x0, x1, nx);
  }
  const std::string bc_default = s.command == Command::Floquet ? "neumann" : "dirichlet";
  s.bc = boundary_from_string(str(c, "bc", bc_default));
  if (s.command == Command::Floquet && s.bc != Boundary::Neumann)
    throw InputError("floquet analyses homogeneous orbits of the Neumann problem; bc must be neumann");
  if ((s.command == Command::Bifurcate || s.command == Command::BlowupDemo) && s.bc != Boundary::Dirichlet)
    throw InputError(to_string(s.command) + " requires bc = dirichlet");

  // Solver.
  s.solver.scheme = scheme_from_string(str(c, "scheme", "eigenbasis"));
  s.solver.dt = num(c, "dt", 0.0);
  s.solver.t_end = num(c, "t_end", 1.0);
  s.solver.blowup_threshold = num(c, "blowup_threshold", 1e6);
  s.solver.diag_stride = positive_int(c, "diag_stride", 1);
  s.solver.lp_exponent = num(c, "lp_exponent", 2.0);
  if (!(s.solver.t_end > 0.0) || !std::isfinite(s.solver.t_end)) throw InputError("t_end must be positive");
  if (!(s.solver.blowup_threshold > 0.0)) throw InputError("blowup_threshold must be positive");
  if (!(s.solver.lp_exponent >= 2.0)) throw InputError("lp_exponent must be >= 2");

  if (c.contains("domain_volume") && !(c.at("domain_volume").get<double>() > 0.0))
    throw InputError("domain_volume must be positive");
  if (c.contains("dimension") && integer(c, "dimension", 1) < 1) throw InputError("dimension must be >= 1");
  if (c.contains("eps_max") && !(num(c, "eps_max", 1e-2) >= 0.0)) throw InputError("eps_max must be >= 0");
  if (c.contains("amplitude") && !std::isfinite(num(c, "amplitude", 1.0))) throw InputError("amplitude must be finite");
  const std::string initial = str(c, "initial", "random");
  if (initial != "random" && initial != "mode" && initial != "sine")
    throw InputError("initial must be 'random', 'mode' or 'sine'");
  return s;
}

Field initial_field(const Grid& grid, Boundary bc, const std::string& kind, double amplitude, std::uint64_t seed) {
  if (kind == "sine") {
    const double lx = grid.lx(), ly = grid.dim() == 2 ? grid.ly() : 1.0;
    const double pi = std::acos(-1.0);
    return Field::sample(grid, bc, [&](double x, double y) {
      double v = std::sin(pi * (x - grid.x0()) / lx);
      if (grid.dim() == 2) v *= std::sin(pi * (y - grid.y0()) / ly);
      return cplx(amplitude * v);
    });
  }
  if (kind == "mode") return amplitude * eigenbasis(grid, bc, 1).field(0);
  if (kind != "random") throw InputError("unknown initial field '" + kind + "'");
  const EigenBasis basis = eigenbasis(grid, bc, 16);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  std::vector<cplx> coeffs(basis.size());
  for (std::size_t m = 0; m < basis.size(); ++m) {
    const double re = uni(rng), im = uni(rng);
    coeffs[m] = cplx(re, im) / (1.0 + basis.modes[m].mu);
  }
  Field u = synthesize(coeffs, basis);
  const double h1 = norm_h1(u);
  if (!(h1 > 0.0)) throw NumericalError("random initial field vanished");
  u *= amplitude / h1;
  return u;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConvergenceError*>(&e)) return 4;
  if (dynamic_cast<const NumericalError*>(&e)) return 3;
  if (dynamic_cast<const InputError*>(&e) || dynamic_cast<const HypothesisError*>(&e) ||
      dynamic_cast<const ShapeError*>(&e) || dynamic_cast<const AliasingError*>(&e))
    return 2;
  if (dynamic_cast<const json::exception*>(&e)) return 2;
  return 3;
}

namespace {

int run_classify(const Scenario& s) {
  const json& c = s.config;
  ClassifyOptions o;
  o.dimension = static_cast<int>(integer(c, "dimension", s.grid->dim()));
  if (c.contains("domain_volume")) o.domain_volume = c.at("domain_volume").get<double>();
  o.lp_exponent = s.solver.lp_exponent;
  const RegimeReport r = classify(s.params, o);
  json j = report_header(s);
  j["regime"] = to_json(r);
  j["proportionality"] = to_json(proportionality(s.params));
  const Coercivity co = coercivity_constant(s.params);
  j["coercivity"] = json{{"M", co.M}, {"valid", co.valid}};
  write_json(s.out / "regime.json", j);
  return 0;
}

int run_boundstate(const Scenario& s) {
  const json& c = s.config;
  const NlsCoeffs co = compute_coeffs(s.boundstate);
  const double L = num(c, "L", default_half_width(co.epsilon));
  const int n = positive_int(c, "n", 4096);
  if (!(L > 0.0)) throw InputError("L must be positive");
  json j = report_header(s);
  j["coefficients"] = to_json(co);
  if (s.boundstate.chi == -1)
    j["admissibility"] = to_json(admissibility_chi_minus(co, s.boundstate.sigma1, s.boundstate.sigma2));
  const Profile p = solve_profile(co, s.boundstate.chi, s.boundstate.sigma1, s.boundstate.sigma2, L, n);
  const BoundState bs = assemble(p, co);
  const auto h = first_integral(p);
  double hmax = 0.0;
  for (double v : h) hmax = std::max(hmax, std::abs(v));
  j["profile"] = json{{"x0", p.x0},
                      {"half_width", p.half_width},
                      {"steps", p.steps},
                      {"peak_error", p.peak_error},
                      {"richardson_error", p.richardson_error},
                      {"max_abs_first_integral", hmax},
                      {"tail_decay_rate", tail_decay_rate(p)},
                      {"expected_tail_decay_rate", -std::sqrt(co.epsilon)},
                      {"residual", residual_bs(bs, s.boundstate)}};
  write_csv(s.out / "profile.csv", profile_table(p, bs));
  write_json(s.out / "boundstate.json", j);
  return 0;
}

json run_summary(const RunResult& r) {
  return json{{"outcome", to_string(r.outcome)},
              {"t_final", r.t_final},
              {"steps", r.steps},
              {"min_dt_exponent", r.min_dt_exponent},
              {"message", r.message},
              {"samples", r.log.samples.size()}};
}

int run_simulate(const Scenario& s) {
  const json& c = s.config;
  const Field u0 = initial_field(*s.grid, s.bc, str(c, "initial", "random"), num(c, "amplitude", 1.0),
                                 static_cast<std::uint64_t>(integer(c, "seed", 1)));
  const RunResult r = run(u0, s.params, s.solver);
  json j = report_header(s);
  j["run"] = run_summary(r);
  j["h1_norm_initial"] = norm_h1(u0);
  j["h1_norm_final"] = std::isfinite(sup_norm(r.u)) ? json(norm_h1(r.u)) : json(nullptr);
  ClassifyOptions o;
  o.dimension = s.grid->dim();
  o.domain_volume = s.grid->volume();
  o.lp_exponent = s.solver.lp_exponent;
  j["h1_stable"] = classify(s.params, o).h1_stable();
  j["lyapunov_V"] = to_json(verify_decay(r.log, Functional::H1));
  j["lyapunov_Wp"] = to_json(verify_decay(r.log, Functional::Lp, s.solver.lp_exponent));
  write_csv(s.out / "diagnostics.csv", diagnostics_table(r.log));
  write_csv(s.out / "final_field.csv", field_table(r.u));
  write_json(s.out / "simulate.json", j);
  return r.outcome == Outcome::Completed ? 0 : 3;
}

int run_floquet(const Scenario& s) {
  const json& c = s.config;
  const PeriodicOrbit orbit = build_orbit(s.params);
  const int steps = positive_int(c, "steps", 4096);
  const MonodromyReport rep = stability_verdict(orbit, *s.grid, steps);
  json j = report_header(s);
  j["orbit"] = json{{"r0", orbit.r0}, {"freq", orbit.freq}, {"period", orbit.period}, {"case", to_string(orbit.which)}};
  j["report"] = to_json(rep);
  j["escape_time"] = nullptr;
  if (rep.verdict == Verdict::Unstable) {
    try {
      j["escape_time"] = instability_blowup_demo(orbit, positive_int(c, "escape_n", 10));
    } catch (const HypothesisError& e) {
      j["escape_note"] = e.what();
    }
  }
  write_csv(s.out / "multipliers.csv", multiplier_table(rep));
  write_json(s.out / "floquet.json", j);
  return 0;
}

int run_bifurcate(const Scenario& s) {
  const json& c = s.config;
  std::array<int, 2> m1{1, 2}, m2{2, 1};
  if (c.contains("mode1")) m1 = {c["mode1"][0].get<int>(), c["mode1"][1].get<int>()};
  if (c.contains("mode2")) m2 = {c["mode2"][0].get<int>(), c["mode2"][1].get<int>()};
  if (s.grid->dim() != 2) throw InputError("bifurcate needs a rectangle domain");
  BifurcationOptions opts;
  opts.basis_size = static_cast<std::size_t>(positive_int(c, "basis_size", 400));
  opts.allow_small_sigma1 = c.value("allow_small_sigma1", false);
  const double eps_max = num(c, "eps_max", 1e-2);
  const int eps_count = positive_int(c, "eps_count", 11);
  std::vector<double> eps_grid{0.0};
  for (int i = 1; i < eps_count; ++i) eps_grid.push_back(eps_max * i / (eps_count - 1));

  json j = report_header(s);
  j["pairs"] = json::array();
  bool truncated = false;
  for (int swapped = 0; swapped < 2; ++swapped) {
    const DoubleEigenpair pair = swapped ? make_pair(*s.grid, m2, m1) : make_pair(*s.grid, m1, m2);
    const BifurcationProblem prob(pair, s.trig, opts);
    const auto roots = find_roots_P(pair, s.trig.sigma1);
    json jp{{"name", swapped ? "swapped" : "primary"},
            {"mode1", swapped ? m2 : m1},
            {"mode2", swapped ? m1 : m2},
            {"lambda0", pair.lambda0},
            {"eigen_residual", eigen_residual(pair)},
            {"resolvent_radius", prob.resolvent_radius()},
            {"roots", json::array()},
            {"branches", json::array()}};
    for (const auto& r : roots) jp["roots"].push_back(to_json(r));
    // The swapped ordering contributes the branch along its own first mode only.
    std::vector<cplx> starts;
    for (const auto& r : roots)
      if (r.simple && (!swapped || std::abs(r.alpha0) < 1e-8)) starts.push_back(r.alpha0);
    for (std::size_t b = 0; b < starts.size(); ++b) {
      const Branch br = prob.continue_branch(starts[b], eps_grid);
      truncated = truncated || br.truncated;
      const std::string file = std::string("branch_") + (swapped ? "swapped_" : "primary_") + std::to_string(b) + ".csv";
      write_csv(s.out / file, branch_table(br));
      json jb = to_json(br);
      jb["file"] = file;
      try {
        jb["asymptotics"] = to_json(asymptotic_check(br, pair, s.trig));
      } catch (const InputError&) {
        jb["asymptotics"] = nullptr;
      }
      jp["branches"].push_back(jb);
    }
    j["pairs"].push_back(jp);
  }
  write_json(s.out / "bifurcation.json", j);
  return truncated ? 4 : 0;
}

int run_blowup_demo(const Scenario& s) {
  const json& c = s.config;
  const Field u0 = initial_field(*s.grid, s.bc, str(c, "initial", "sine"), num(c, "amplitude", 6.0),
                                 static_cast<std::uint64_t>(integer(c, "seed", 1)));
  const BlowupEnergy e =
      blowup_energy(u0, num(c, "theta", 0), num(c, "nu", 0), num(c, "sigma1", 2), num(c, "sigma2", 4), num(c, "k", 0));
  if (!e.hypotheses_hold) throw HypothesisError("blow-up criterion needs k >= 0 and (nu <= 0 or sigma2 <= sigma1)");
  const RunResult r = run(u0, s.params, s.solver);
  json j = report_header(s);
  j["energy"] = e.energy;
  j["energy_negative"] = e.energy < 0.0;
  j["run"] = run_summary(r);
  j["blowup_time"] = r.outcome == Outcome::BlowUp ? json(r.t_final) : json(nullptr);
  write_csv(s.out / "diagnostics.csv", diagnostics_table(r.log));
  write_json(s.out / "blowup.json", j);
  return r.outcome == Outcome::BlowUp ? 0 : 3;
}

}  // namespace

int run_scenario(const Scenario& s) {
  switch (s.command) {
    case Command::Classify: return run_classify(s);
    case Command::BoundState: return run_boundstate(s);
    case Command::Simulate: return run_simulate(s);
    case Command::Floquet: return run_floquet(s);
    case Command::Bifurcate: return run_bifurcate(s);
    case Command::BlowupDemo: return run_blowup_demo(s);
  }
  return 2;
}

int run_sweep(const json& sweep, const json& overrides, const std::string& command, const fs::path& out, int jobs) {
  if (!sweep.is_object() || !sweep.contains("runs") || !sweep.at("runs").is_array())
    throw InputError("sweep file needs a 'runs' array");
  for (auto it = sweep.begin(); it != sweep.end(); ++it)
    if (it.key() != "base" && it.key() != "runs") throw InputError("unknown sweep key '" + it.key() + "'");
  const json base = sweep.value("base", json::object());
  const json& runs = sweep.at("runs");
  const std::size_t n = runs.size();
  std::vector<int> codes(n, 0);
  std::vector<std::string> messages(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        json cfg = merge_config(merge_config(base, runs[i]), overrides);
        cfg["command"] = command;
        cfg["out"] = (out / ("run_" + std::to_string(i))).string();
        codes[i] = run_scenario(parse_config(cfg));
      } catch (const std::exception& e) {
        codes[i] = exit_code_for(e);
        messages[i] = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(n)));
  for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  json idx{{"spec_version", kSpecVersion}, {"command", command}, {"runs", json::array()}};
  int worst = 0;
  for (std::size_t i = 0; i < n; ++i) {
    idx["runs"].push_back(json{{"index", i}, {"dir", "run_" + std::to_string(i)}, {"exit_code", codes[i]}, {"message", messages[i]}});
    worst = std::max(worst, codes[i]);
  }
  write_json(out / "sweep.json", idx);
  return worst;
}

}  // namespace cgl
