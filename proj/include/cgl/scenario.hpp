#pragma once

#include <array>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cgl/boundstate.hpp"
#include "cgl/discretization.hpp"
#include "cgl/evolution.hpp"
#include "cgl/io.hpp"
#include "cgl/params.hpp"

namespace cgl {

enum class Command { Classify, BoundState, Simulate, Floquet, Bifurcate, BlowupDemo };

std::string to_string(Command c);
Command command_from_string(const std::string& s);
const std::vector<std::string>& command_names();

enum class KeyKind { Number, Integer, String, Bool, IntPair };

struct KeySpec {
  const char* name;
  KeyKind kind;
  const char* help;
};

/// Every accepted configuration key.
const std::vector<KeySpec>& config_keys();

/// Converts a command-line override string to the JSON type of `key`.
/// Throws InputError for unknown keys or malformed values.
json parse_override(const std::string& key, const std::string& value);

struct Scenario {
  Command command = Command::Classify;
  /// Validated configuration (plus the resolved domain); echoed into every report.
  json config;
  std::filesystem::path out = "out";

  ParamSet params;
  TrigParamSet trig;
  BoundStateSpec boundstate;
  std::optional<Grid> grid;
  Boundary bc = Boundary::Dirichlet;
  SolverConfig solver;
};

/// Validates `config` (unknown keys, types, required keys, invariants) and
/// fills defaults. Throws InputError or HypothesisError.
Scenario parse_config(const json& config);

json load_json_file(const std::filesystem::path& path);

/// Applies `overrides` on top of `base` (flags override file).
json merge_config(json base, const json& overrides);

/// Seeded combination of the lowest 16 eigenmodes scaled to ||u||_{H1} = amplitude
/// ("random"), amplitude times the lowest L2-normalised mode ("mode"), or
/// amplitude times the product of half-period sines ("sine").
Field initial_field(const Grid& grid, Boundary bc, const std::string& kind, double amplitude, std::uint64_t seed);

/// Runs the pipeline and writes its outputs below s.out. Returns the exit code
/// (0 success, 3 numerical failure, 4 nonconvergence); errors propagate.
int run_scenario(const Scenario& s);

/// Exit code for an escaped exception: 2 input/hypothesis, 3 numerical, 4 convergence.
int exit_code_for(const std::exception& e);

/// Sweep file {"base": {...}, "runs": [{...}, ...]}: each run is base + run + overrides,
/// written to out/run_<index>. Runs execute on `jobs` worker threads. Returns the
/// largest exit code.
int run_sweep(const json& sweep, const json& overrides, const std::string& command,
              const std::filesystem::path& out, int jobs);

}  // namespace cgl
