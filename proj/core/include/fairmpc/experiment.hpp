#pragma once

/**
 * @file
 * @brief Experiment runs and their on-disk artifacts.
 *
 * A run writes three files into its output directory:
 *
 *   trace.csv    one row per step, 17 significant digits
 *   kpi.json     aggregate indexes
 *   summary.txt  human-readable table
 */

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "fairmpc/analysis.hpp"
#include "fairmpc/metrics.hpp"
#include "fairmpc/sim.hpp"

namespace fairmpc {

struct RunManifest
{
  /// preset name, or a path to a scenario JSON file
  std::string scenario_source = "two-system";
  Strategy strategy = Strategy::FairMpc;
  AutotuneMode autotune = AutotuneMode::Fixed;
  CcpSettings solver;
  EqualityFormulation equality = EqualityFormulation::TwoSidedDC;
  std::optional<bool> budget_in_horizon;
  std::filesystem::path output_dir = "out";
  std::uint64_t seed = 0;
  TrackingSpec tracking;
  double alpha_pct = 10.0;
};

[[nodiscard]] Strategy parse_strategy(const std::string & text);
[[nodiscard]] AutotuneMode parse_autotune(const std::string & text);
/// "dc" or "hinge"
[[nodiscard]] EqualityFormulation parse_equality_mode(const std::string & text);
[[nodiscard]] const char * to_string(EqualityFormulation f);

/// Preset when the name is known, scenario file otherwise; throws ScenarioError.
[[nodiscard]] Scenario load_scenario(const std::string & source);

/// 0 when every step solved to optimality, 2 when a step hit the iteration cap, 1 when the run aborted.
[[nodiscard]] int exit_code_for(const SimulationTrace & trace);

/// Column names follow x{i}_{j} and u{i}_{j} with 1-based system and component indices.
void write_trace_csv(std::ostream & out, const SimulationTrace & trace);
[[nodiscard]] std::string kpi_json(const KpiReport & kpis);
[[nodiscard]] std::string summary_text(const Scenario & scenario, const RunManifest & manifest,
  const SimulationTrace & trace, const KpiReport & kpis);

struct RunOutcome
{
  SimulationTrace trace;
  KpiReport kpis;
  int exit_code = 0;
};

/// Runs the closed loop and writes the artifacts; throws std::runtime_error on I/O failure.
[[nodiscard]] RunOutcome run_experiment(const Scenario & scenario, const RunManifest & manifest);

[[nodiscard]] std::string verification_text(const VerificationReport & report);

}  // namespace fairmpc
