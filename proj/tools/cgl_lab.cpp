// cgl-lab <command> [--config path] [--out dir] [--sweep path --jobs n] [--<key> value ...]

#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"

#include "cgl/errors.hpp"
#include "cgl/scenario.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Numerical laboratory for the generalized complex Ginzburg-Landau equation"};
  std::string command, config_path, out_dir, sweep_path;
  int jobs = 1;
  app.add_option("command", command, "classify | boundstate | simulate | floquet | bifurcate | blowup-demo")
      ->required()
      ->check(CLI::IsMember(cgl::command_names()));
  app.add_option("--config", config_path, "JSON scenario file");
  app.add_option("--out", out_dir, "output directory (default: out)");
  app.add_option("--sweep", sweep_path, "sweep file {\"base\": {...}, \"runs\": [...]}");
  app.add_option("--jobs", jobs, "worker threads for --sweep")->check(CLI::PositiveNumber);

  std::map<std::string, std::string> flags;
  for (const auto& k : cgl::config_keys()) {
    const std::string name = k.name;
    if (name == "command" || name == "out") continue;
    app.add_option("--" + name, flags[name], k.help);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    cgl::json overrides = cgl::json::object();
    for (const auto& [key, value] : flags)
      if (app.count("--" + key) > 0) overrides[key] = cgl::parse_override(key, value);
    if (!out_dir.empty()) overrides["out"] = out_dir;

    if (!sweep_path.empty()) {
      if (!config_path.empty()) throw cgl::InputError("--sweep and --config are mutually exclusive");
      const auto out = out_dir.empty() ? std::filesystem::path("out") : std::filesystem::path(out_dir);
      overrides.erase("out");
      const int code = cgl::run_sweep(cgl::load_json_file(sweep_path), overrides, command, out, jobs);
      std::cout << "sweep finished, worst exit code " << code << "\n";
      return code;
    }

    cgl::json cfg = config_path.empty() ? cgl::json::object() : cgl::load_json_file(config_path);
    if (!cfg.is_object()) throw cgl::InputError("configuration must be a JSON object");
    if (cfg.contains("command") && cfg["command"] != command)
      throw cgl::InputError("config command '" + cfg["command"].get<std::string>() + "' differs from '" + command + "'");
    cfg["command"] = command;
    const cgl::Scenario s = cgl::parse_config(cgl::merge_config(cfg, overrides));
    const int code = cgl::run_scenario(s);
    std::cout << command << ": exit " << code << ", outputs in " << s.out.string() << "\n";
    return code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cgl::exit_code_for(e);
  }
}
