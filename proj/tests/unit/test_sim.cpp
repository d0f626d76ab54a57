#include "doctest.h"
#include "fairmpc/analysis.hpp"
#include "fairmpc/presets.hpp"
#include "fairmpc/sim.hpp"

#include <cmath>

using namespace fairmpc;

TEST_CASE("budget update")
{
  const Vector u = (Vector(3) << 10.0, -15.0, 5.0).finished();
  CHECK(update_budget({BudgetMode::Depleting, 200.0}, 200.0, u) == doctest::Approx(170.0));
  CHECK(update_budget({BudgetMode::DepletingInHorizon, 200.0}, 20.0, u) == 0.0);
  CHECK(update_budget({BudgetMode::ConstantPerStep, 10.0}, 3.0, u) == 10.0);
}

TEST_CASE("strategy masks")
{
  const auto w = make_preset("two-system").weights;
  const auto only = apply_strategy(w, Strategy::PerformanceOnly);
  CHECK(only.rho_bar[0] == 0.0);
  CHECK(only.w_bar[1].norm() == 0.0);
  const auto equality = apply_strategy(w, Strategy::PerformanceEquality);
  CHECK(equality.rho_bar[0] == w.rho_bar[0]);
  CHECK(equality.w_bar[0].norm() == 0.0);
  const auto equity = apply_strategy(w, Strategy::PerformanceEquity);
  CHECK(equity.rho_bar[1] == 0.0);
  CHECK(equity.w_bar[0].norm() == w.w_bar[0].norm());
}

TEST_CASE("weight auto-tuning")
{
  AutotuneState st;
  st.mode = AutotuneMode::CaseB;
  st.rho_bar = {3.0, 3.0, 3.0};
  st.w_bar = std::vector<Matrix>(3, Matrix::Identity(1, 1));

  // jain = 2/3 for three systems, scaled to 0.5
  autotune_weights(st, 1, (Vector(3) << 1.0, 1.0, 0.0).finished(), (Vector(3) << 2.0, 2.0, 2.0).finished(), 3);
  CHECK(st.rho_bar[2] == doctest::Approx(2.0));
  CHECK(st.w_bar[0](0, 0) == doctest::Approx(1.0));

  SUBCASE("scaled jain of zero hits the upper clamp")
  {
    autotune_weights(st, 2, (Vector(3) << 1.0, 0.0, 0.0).finished(), Vector::Zero(3), 3);
    CHECK(st.rho_bar[0] == 1e3);
  }
  SUBCASE("case A halves after t_bar")
  {
    st.mode = AutotuneMode::CaseA;
    st.t_bar = 4;
    autotune_weights(st, 5, Vector::Ones(3), Vector::Zero(3), 3);
    CHECK(st.rho_bar[0] == doctest::Approx(1.0));
  }
  SUBCASE("fixed mode is inert")
  {
    st.mode = AutotuneMode::Fixed;
    autotune_weights(st, 3, (Vector(3) << 1.0, 0.0, 0.0).finished(), Vector::Zero(3), 3);
    CHECK(st.rho_bar[0] == doctest::Approx(2.0));
  }
}

TEST_CASE("overshoot detection window")
{
  const Vector xs = (Vector(2) << 1.0, 1.0).finished();
  std::vector<Vector> states;
  // system 2 sits above its target from t = 2 on; T = 10 gives a window of 2
  for (int t = 0; t < 8; ++t) { states.push_back((Vector(2) << 0.0, t >= 2 ? 1.5 : 0.5).finished()); }
  const auto t_bar = detect_tbar(states, xs, 2, 10, default_probe());
  REQUIRE(t_bar.has_value());
  CHECK(*t_bar == 4);

  states.resize(4);
  CHECK_FALSE(detect_tbar(states, xs, 2, 10, default_probe()).has_value());
}

TEST_CASE("single step simulation")
{
  auto sc = make_preset("two-system");
  sc.sim_steps_t = 1;
  const auto trace = run_closed_loop(sc);
  REQUIRE(trace.length() == 1);
  CHECK_FALSE(trace.aborted);
  const auto ens = build_ensemble(sc);
  const Vector expected = ens.a * trace.steps[0].x + ens.b * trace.steps[0].u;
  CHECK((trace.final_state - expected).norm() == 0.0);
}

TEST_CASE("closed loop follows the plant and respects the budget")
{
  const auto sc = make_preset("two-system");
  const auto trace = run_closed_loop(sc);
  REQUIRE(trace.length() == sc.sim_steps_t);
  CHECK_FALSE(trace.aborted);
  const auto ens = build_ensemble(sc);
  for (int t = 0; t + 1 < trace.length(); ++t) {
    const auto & s = trace.steps[t];
    CHECK((trace.steps[t + 1].x - (ens.a * s.x + ens.b * s.u)).norm() == 0.0);
    CHECK(s.u.lpNorm<1>() <= s.u_bar + 1e-6);
    CHECK(s.status == SolveStatus::Optimal);
  }
}

TEST_CASE("depleting budget is conserved")
{
  const auto sc = make_preset("motion-two-system-depleting");
  SimOptions opts;
  opts.strategy = Strategy::PerformanceOnly;
  const auto trace = run_closed_loop(sc, opts);
  REQUIRE(trace.length() > 0);
  double spent = 0.0;
  for (const auto & s : trace.steps) {
    CHECK(s.u_bar == doctest::Approx(std::max(0.0, sc.budget.u_bar_0 - spent)).epsilon(1e-12));
    spent += s.u.lpNorm<1>();
  }
  CHECK(spent <= sc.budget.u_bar_0 + 1e-6);
}

TEST_CASE("case A keeps rho_bar nonincreasing after overshoot")
{
  const auto sc = make_preset("two-system-unstable");
  SimOptions opts;
  opts.autotune = AutotuneMode::CaseA;
  const auto trace = run_closed_loop(sc, opts);
  REQUIRE_FALSE(trace.aborted);
  if (trace.t_bar) {
    for (int t = *trace.t_bar + 2; t < trace.length(); ++t) {
      CHECK(trace.steps[t].rho_bar[0] <= trace.steps[t - 1].rho_bar[0] + 1e-15);
    }
  }
  for (const auto & s : trace.steps) {
    CHECK(s.rho_bar[0] >= 1e-3);
    CHECK(s.rho_bar[0] <= 1e3);
  }
}

TEST_CASE("without fairness weights the first step matches a plain tracking MPC")
{
  auto sc = make_preset("two-system");
  sc.horizon_l = 8;
  auto w = apply_strategy(sc.weights, Strategy::PerformanceOnly);
  Vector x(2);
  x << sc.initial_states[0](0), sc.initial_states[1](0);
  const auto fair = solve_fair_mpc(assemble_ocp(sc, x, sc.budget.u_bar_0, w));
  const auto ref = solve_reference_mpc(sc, x, sc.budget.u_bar_0, w);
  REQUIRE(fair.status == SolveStatus::Optimal);
  REQUIRE(ref.status == QpStatus::Solved);
  CHECK(fair.cost.total == doctest::Approx(ref.objective).epsilon(1e-6));
}
