#include "fairmpc/sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fairmpc/metrics.hpp"

namespace fairmpc {

namespace {

constexpr double kExhausted = 1e-12;

Vector stacked_initial_state(const Scenario & sc)
{
  const int n = sc.state_dim();
  Vector x(n * sc.num_systems());
  for (int i = 0; i < sc.num_systems(); ++i) { x.segment(i * n, n) = sc.initial_states[i]; }
  return x;
}

}  // namespace

const char * to_string(Strategy s)
{
  switch (s) {
    case Strategy::PerformanceOnly: return "performance-only";
    case Strategy::PerformanceEquality: return "performance-equality";
    case Strategy::PerformanceEquity: return "performance-equity";
    case Strategy::FairMpc: return "fair-mpc";
  }
  return "unknown";
}

const char * to_string(AutotuneMode m)
{
  switch (m) {
    case AutotuneMode::Fixed: return "fixed";
    case AutotuneMode::CaseA: return "case-a";
    case AutotuneMode::CaseB: return "case-b";
  }
  return "unknown";
}

WeightSet apply_strategy(WeightSet weights, Strategy strategy)
{
  const bool drop_rho = strategy == Strategy::PerformanceOnly || strategy == Strategy::PerformanceEquity;
  const bool drop_w = strategy == Strategy::PerformanceOnly || strategy == Strategy::PerformanceEquality;
  if (drop_rho) { std::fill(weights.rho_bar.begin(), weights.rho_bar.end(), 0.0); }
  if (drop_w) {
    for (auto & w : weights.w_bar) { w.setZero(); }
  }
  return weights;
}

double update_budget(const BudgetPolicy & policy, double previous_u_bar, const Vector & applied_input)
{
  if (policy.mode == BudgetMode::ConstantPerStep) { return policy.u_bar_0; }
  return std::max(0.0, previous_u_bar - applied_input.lpNorm<1>());
}

void autotune_weights(AutotuneState & state, int t, const Vector & u_prev, const Vector & e_prev, int num_systems)
{
  if (state.mode == AutotuneMode::Fixed || t < 1) { return; }
  auto clamp = [&](double v) { return std::isfinite(v) ? std::clamp(v, state.clamp_min, state.clamp_max) : state.clamp_max; };

  const bool halve = state.mode == AutotuneMode::CaseA && state.t_bar && t > *state.t_bar;
  const double from_jain = clamp(1.0 / scaled_jain(u_prev, num_systems));
  for (auto & r : state.rho_bar) { r = halve ? clamp(r / 2.0) : from_jain; }

  const auto n = e_prev.size() / num_systems;
  const double w = clamp(1.0 / equity_instant(Vector::Zero(e_prev.size()), e_prev, num_systems));
  for (auto & wb : state.w_bar) { wb = w * Matrix::Identity(n, n); }
}

Probe default_probe()
{
  return [](const Vector & e) { return e(0); };
}

std::optional<int> detect_tbar(
  const std::vector<Vector> & states, const Vector & x_s, int num_systems, int sim_steps, const Probe & probe)
{
  const int window = static_cast<int>(std::ceil(0.2 * sim_steps));
  const auto n = x_s.size() / num_systems;
  const Probe & p = probe ? probe : default_probe();
  for (int t = window; t < static_cast<int>(states.size()); ++t) {
    for (int i = 0; i < num_systems; ++i) {
      bool below = true;
      for (int tau = t - window; tau <= t && below; ++tau) {
        below = p(x_s.segment(i * n, n) - states[tau].segment(i * n, n)) < 0.0;
      }
      if (below) { return t; }
    }
  }
  return std::nullopt;
}

bool SimulationTrace::any_max_iterations() const
{
  return std::any_of(steps.begin(), steps.end(), [](const auto & s) { return s.status == SolveStatus::MaxIterations; });
}

SimulationTrace run_closed_loop(const Scenario & scenario, const SimOptions & options)
{
  const auto report = validate_scenario(scenario);
  if (!report.ok()) {
    throw std::invalid_argument("run_closed_loop: invalid scenario: " + report.errors.front().message);
  }
  const auto ens = build_ensemble(scenario);
  const int big_n = ens.num_systems;
  const bool in_horizon = options.budget_in_horizon.value_or(scenario.budget.mode == BudgetMode::DepletingInHorizon);
  const Probe probe = options.probe ? options.probe : default_probe();

  SimulationTrace trace;
  trace.num_systems = big_n;
  trace.n = ens.n;
  trace.m = ens.m;
  trace.x_s = ens.x_s;

  AutotuneState tune;
  tune.mode = options.autotune;
  tune.rho_bar = scenario.weights.rho_bar;
  tune.w_bar = scenario.weights.w_bar;

  Vector x = stacked_initial_state(scenario);
  double u_bar = scenario.budget.u_bar_0;
  Vector u_prev;
  std::optional<Trajectories> previous;
  std::vector<Vector> history;

  for (int t = 0; t < scenario.sim_steps_t; ++t) {
    if (t > 0) { u_bar = update_budget(scenario.budget, u_bar, u_prev); }
    history.push_back(x);
    if (!tune.t_bar) { tune.t_bar = detect_tbar(history, ens.x_s, big_n, scenario.sim_steps_t, probe); }
    if (t > 0) { autotune_weights(tune, t, u_prev, ens.x_s - history[t - 1], big_n); }

    WeightSet active = scenario.weights;
    active.rho_bar = tune.rho_bar;
    active.w_bar = tune.w_bar;
    active = apply_strategy(active, options.strategy);

    StepRecord rec;
    rec.t = t;
    rec.x = x;
    rec.u_bar = u_bar;
    rec.rho_bar = active.rho_bar;
    rec.w_bar = active.w_bar;

    Vector u;
    if (u_bar <= kExhausted) {
      u = Vector::Zero(ens.nu());
      rec.budget_exhausted = true;
      previous.reset();
    } else {
      const auto inst = assemble_ocp(scenario, x, u_bar, active, {in_horizon, options.equality});
      std::optional<Trajectories> warm;
      if (previous) { warm = shift_warm_start(*previous, ens, x); }
      const auto res = solve_fair_mpc(inst, options.solver, warm);
      if (res.status == SolveStatus::Infeasible) {
        trace.aborted = true;
        trace.diagnosis = "step " + std::to_string(t) + ": " + res.diagnosis;
        break;
      }
      u = res.trajectories.inputs.front();
      // strip solver round-off above the budget so the plant never overspends
      const double spent = u.lpNorm<1>();
      if (spent > u_bar) { u *= u_bar / spent; }
      rec.status = res.status;
      rec.outer_iterations = res.outer_iterations;
      rec.cost = res.cost;
      previous = res.trajectories;
    }
    rec.u = u;
    rec.jain_scaled = scaled_jain(u, big_n);
    rec.equity = equity_instant(x, ens.x_s, big_n);
    trace.steps.push_back(std::move(rec));

    x = plant_step(ens, x, u);
    u_prev = u;
  }
  trace.final_state = x;
  trace.t_bar = tune.t_bar;
  return trace;
}

}  // namespace fairmpc
