// Command-line front end: run, verify, validate, presets.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "fairmpc/experiment.hpp"
#include "fairmpc/presets.hpp"
#include "fairmpc/scenario_io.hpp"

namespace {

constexpr int kInputError = 3;

struct Source
{
  std::string scenario;
  std::string preset;

  [[nodiscard]] std::string resolve() const
  {
    if (!scenario.empty() && !preset.empty()) { throw std::invalid_argument("give either --scenario or --preset"); }
    if (scenario.empty() && preset.empty()) { throw std::invalid_argument("one of --scenario or --preset is required"); }
    return preset.empty() ? scenario : preset;
  }
};

void add_source(CLI::App * cmd, Source & src)
{
  cmd->add_option("--scenario", src.scenario, "Scenario JSON file");
  cmd->add_option("--preset", src.preset, "Built-in scenario name (see `presets`)");
}

std::string read_file(const std::string & path)
{
  std::ifstream in(path);
  if (!in) { throw fairmpc::ScenarioError("", "cannot open " + path); }
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"Fairness-aware MPC for ensembles of linear systems"};
  app.require_subcommand(1);

  Source run_src;
  std::string strategy = "fair-mpc";
  std::string autotune = "fixed";
  std::string equality = "dc";
  std::string out_dir = "out";
  std::uint64_t run_seed = 0;
  bool in_horizon = false;
  int max_outer = fairmpc::CcpSettings{}.max_outer_iterations;
  auto * run = app.add_subcommand("run", "Simulate the closed loop and write trace.csv, kpi.json, summary.txt");
  add_source(run, run_src);
  run->add_option("--strategy", strategy, "performance-only | performance-equality | performance-equity | fair-mpc")
    ->capture_default_str();
  run->add_option("--autotune", autotune, "fixed | case-a | case-b")->capture_default_str();
  run->add_option("--equality-mode", equality, "dc | hinge")->capture_default_str();
  run->add_option("--out", out_dir, "Output directory")->capture_default_str();
  run->add_option("--seed", run_seed, "Seed (runs are deterministic; kept for manifest symmetry)");
  run->add_flag("--budget-in-horizon", in_horizon, "Model budget depletion inside the prediction horizon");
  run->add_option("--max-outer", max_outer, "Outer iteration cap of the convex-concave loop")->capture_default_str();

  Source ver_src;
  int draws = 1000;
  std::uint64_t ver_seed = 0;
  std::string ver_out;
  auto * verify = app.add_subcommand("verify", "Check the cost identities and bounds on random feasible draws");
  add_source(verify, ver_src);
  verify->add_option("--draws", draws, "Number of random draws")->capture_default_str()->check(CLI::NonNegativeNumber);
  verify->add_option("--seed", ver_seed, "Random seed")->capture_default_str();
  verify->add_option("--out", ver_out, "Also write verify.txt into this directory");

  Source val_src;
  auto * validate = app.add_subcommand("validate", "Report scenario errors and warnings");
  add_source(validate, val_src);

  auto * presets = app.add_subcommand("presets", "List built-in scenarios");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      fairmpc::RunManifest manifest;
      manifest.scenario_source = run_src.resolve();
      manifest.strategy = fairmpc::parse_strategy(strategy);
      manifest.autotune = fairmpc::parse_autotune(autotune);
      manifest.equality = fairmpc::parse_equality_mode(equality);
      manifest.output_dir = out_dir;
      manifest.seed = run_seed;
      if (in_horizon) { manifest.budget_in_horizon = true; }
      manifest.solver.max_outer_iterations = max_outer;
      fairmpc::validate_settings(manifest.solver);
      const auto scenario = fairmpc::load_scenario(manifest.scenario_source);
      const auto outcome = fairmpc::run_experiment(scenario, manifest);
      if (outcome.trace.length() > 0) {
        std::cout << fairmpc::summary_text(scenario, manifest, outcome.trace, outcome.kpis);
      }
      if (outcome.trace.aborted) { std::cerr << "run aborted: " << outcome.trace.diagnosis << '\n'; }
      return outcome.exit_code;
    }
    if (*verify) {
      const auto scenario = fairmpc::load_scenario(ver_src.resolve());
      const auto report = fairmpc::run_verification(scenario, draws, ver_seed);
      const auto text = fairmpc::verification_text(report);
      std::cout << text;
      if (!ver_out.empty()) {
        std::filesystem::create_directories(ver_out);
        std::ofstream(std::filesystem::path(ver_out) / "verify.txt") << text;
      }
      return report.passed() ? 0 : 1;
    }
    if (*validate) {
      const auto source = val_src.resolve();
      const bool is_preset = !val_src.preset.empty();
      const auto scenario = is_preset ? fairmpc::make_preset(source) : fairmpc::parse_scenario_json(read_file(source));
      const auto report = fairmpc::validate_scenario(scenario);
      for (const auto & e : report.errors) { std::cout << "error   [" << e.code << "] " << e.message << '\n'; }
      for (const auto & w : report.warnings) { std::cout << "warning [" << w.code << "] " << w.message << '\n'; }
      std::cout << (report.ok() ? "valid" : "invalid") << '\n';
      return report.ok() ? 0 : 1;
    }
    if (*presets) {
      for (const auto & p : fairmpc::list_presets()) { std::cout << p.name << "\t" << p.description << '\n'; }
      return 0;
    }
  } catch (const std::exception & e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  }
  return 0;
}
