#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fairmpc/model.hpp"
#include "fairmpc/ocp.hpp"
#include "fairmpc/solver.hpp"

namespace fairmpc {

/// Which penalties stay active; masking zeroes weights but keeps every cost term.
enum class Strategy { PerformanceOnly, PerformanceEquality, PerformanceEquity, FairMpc };

enum class AutotuneMode { Fixed, CaseA, CaseB };

[[nodiscard]] const char * to_string(Strategy s);
[[nodiscard]] const char * to_string(AutotuneMode m);

/// PerformanceOnly zeroes rho_bar and w_bar, PerformanceEquality zeroes w_bar, PerformanceEquity zeroes rho_bar.
[[nodiscard]] WeightSet apply_strategy(WeightSet weights, Strategy strategy);

/// ConstantPerStep returns u_bar_0; the depleting modes subtract the spent effort, floored at 0.
[[nodiscard]] double update_budget(const BudgetPolicy & policy, double previous_u_bar, const Vector & applied_input);

struct AutotuneState
{
  AutotuneMode mode = AutotuneMode::Fixed;
  std::optional<int> t_bar;
  std::vector<double> rho_bar;
  std::vector<Matrix> w_bar;
  double clamp_min = 1e-3;
  double clamp_max = 1e3;
};

/**
 * @brief Weight update from the last applied input and the last tracking errors.
 *
 * rho_bar becomes 1 / (scaled Jain of u_prev) up to t_bar and halves afterwards
 * (CaseA only); w_bar becomes I / (instantaneous equity of e_prev). Both are
 * clamped. Fixed mode leaves the state untouched.
 */
void autotune_weights(AutotuneState & state, int t, const Vector & u_prev, const Vector & e_prev, int num_systems);

/// Scalar functional of one system's tracking error x_s^i - x^i.
using Probe = std::function<double(const Vector & error)>;

/// First state component of the error.
[[nodiscard]] Probe default_probe();

/**
 * @brief First t at which some system kept probe(x_s^i - x_tau^i) < 0 for every tau in [t - ceil(0.2 T), t].
 *
 * states holds x_0..x_t stacked; windows reaching before t = 0 never trigger.
 */
[[nodiscard]] std::optional<int> detect_tbar(
  const std::vector<Vector> & states, const Vector & x_s, int num_systems, int sim_steps, const Probe & probe);

struct StepRecord
{
  int t = 0;
  Vector x;
  Vector u;
  double u_bar = 0.0;
  std::vector<double> rho_bar;
  std::vector<Matrix> w_bar;
  double jain_scaled = 1.0;
  double equity = 1.0;
  SolveStatus status = SolveStatus::Optimal;
  /// the budget was exhausted and the zero input was applied without a solve
  bool budget_exhausted = false;
  int outer_iterations = 0;
  CostBreakdown cost;
};

struct SimulationTrace
{
  int num_systems = 0;
  int n = 0;
  int m = 0;
  Vector x_s;
  std::vector<StepRecord> steps;
  Vector final_state;
  std::optional<int> t_bar;
  bool aborted = false;
  std::string diagnosis;

  [[nodiscard]] int length() const { return static_cast<int>(steps.size()); }
  [[nodiscard]] bool any_max_iterations() const;
};

struct SimOptions
{
  Strategy strategy = Strategy::FairMpc;
  AutotuneMode autotune = AutotuneMode::Fixed;
  CcpSettings solver;
  EqualityFormulation equality = EqualityFormulation::TwoSidedDC;
  /// overrides the budget mode's own choice when set
  std::optional<bool> budget_in_horizon;
  Probe probe;
};

[[nodiscard]] SimulationTrace run_closed_loop(const Scenario & scenario, const SimOptions & options = {});

}  // namespace fairmpc
