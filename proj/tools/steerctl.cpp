// steerctl: scenario-driven front end for the steering / Bell bound library.
// Exit codes: 0 ok, 1 scenario parse error, 2 solver failure, 3 verification
// failure.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "steer/scenario_io.hpp"

namespace {

int write_output(const std::string& out_path, const std::string& payload) {
  if (out_path.empty()) {
    std::cout << payload;
    return 0;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot open output file " << out_path << "\n";
    return 2;
  }
  out << payload;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"detection-loophole-adjusted steering and Bell bounds"};
  app.require_subcommand(1);

  std::string scenario_path, out_path, preset_override, reference_path;
  double tol = 1e-8;
  int max_iters = 200;
  unsigned seed = 1;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("scenario", scenario_path, "scenario JSON file")->required();
    sub->add_option("--tol", tol, "solver tolerance");
    sub->add_option("--max-iters", max_iters, "solver iteration cap");
    sub->add_option("--seed", seed, "seed for randomized verification checks");
    sub->add_option("--preset", preset_override, "override the efficiency preset");
    sub->add_option("--out", out_path, "write output to this path instead of stdout");
  };

  auto* cmd_bound = app.add_subcommand("bound", "compute a single post-selected bound");
  auto* cmd_sweep = app.add_subcommand("sweep", "sweep the bound over eta, emit CSV");
  auto* cmd_verify = app.add_subcommand("verify", "run consistency checks");
  add_common(cmd_bound);
  add_common(cmd_sweep);
  add_common(cmd_verify);
  cmd_verify->add_option("--reference", reference_path,
                         "previously generated sweep CSV to compare against");

  CLI11_PARSE(app, argc, argv);

  steer::Scenario scenario;
  try {
    scenario = steer::load_scenario(scenario_path);
    if (!preset_override.empty()) {
      scenario.preset = preset_override;
      scenario.profile(1.0);  // validates the name
    }
  } catch (const steer::ScenarioParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 1;
  }

  steer::SolveOptions opts;
  opts.tol = tol;
  opts.max_iters = max_iters;

  try {
    if (cmd_bound->parsed()) {
      auto r = steer::compute_bound(scenario, -1.0, opts);
      int rc = write_output(out_path, steer::bound_json(scenario, r));
      if (rc != 0) return rc;
      return r.failed ? 2 : 0;
    }
    if (cmd_sweep->parsed()) {
      if (!scenario.sweep) {
        std::cerr << "parse error: scenario has no sweep block\n";
        return 1;
      }
      return write_output(out_path, steer::sweep_csv(scenario, opts));
    }
    // verify
    auto rep = steer::verify_scenario(scenario, opts, seed);
    if (!reference_path.empty()) {
      if (!scenario.sweep) {
        std::cerr << "parse error: --reference needs a scenario with a sweep block\n";
        return 1;
      }
      std::ifstream ref(reference_path, std::ios::binary);
      std::stringstream ss;
      ss << ref.rdbuf();
      const bool match = ref.good() && ss.str() == steer::sweep_csv(scenario, opts);
      ++rep.checks;
      if (!match) ++rep.failures;
      rep.text += std::string(match ? "PASS" : "FAIL") +
                  "  reference CSV comparison\n";
    }
    int rc = write_output(out_path, rep.text);
    if (rc != 0) return rc;
    return rep.failures > 0 ? 3 : 0;
  } catch (const std::exception& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return 2;
  }
}
