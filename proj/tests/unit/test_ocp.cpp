#include "doctest.h"
#include "fairmpc/ocp.hpp"
#include "fairmpc/presets.hpp"

using namespace fairmpc;

namespace {

Vector stacked_initial(const Scenario & sc)
{
  const int n = sc.state_dim();
  Vector x(n * sc.num_systems());
  for (int i = 0; i < sc.num_systems(); ++i) { x.segment(i * n, n) = sc.initial_states[i]; }
  return x;
}

/// Rolls the ensemble forward from x0, one state per input.
Trajectories rollout(const EnsembleModel & ens, const Vector & x0, const std::vector<Vector> & inputs)
{
  Trajectories t;
  Vector x = x0;
  for (const auto & u : inputs) {
    t.states.push_back(x);
    t.inputs.push_back(u);
    x = plant_step(ens, x, u);
  }
  return t;
}

}  // namespace

TEST_CASE("equity matrices and the equivalent weight, hand case")
{
  const auto s = build_equity_matrices(1, 2);
  REQUIRE(s.size() == 2);
  CHECK(s[0](0, 0) == doctest::Approx(0.5));
  CHECK(s[0](0, 1) == doctest::Approx(-0.5));
  const Matrix q_tilde = build_qtilde({Matrix::Identity(1, 1), Matrix::Identity(1, 1)},
    {Matrix::Identity(1, 1), Matrix::Identity(1, 1)}, s);
  CHECK(q_tilde.isApprox((Matrix(2, 2) << 1.5, -0.5, -0.5, 1.5).finished()));
  const Vector d = (Vector(2) << 1.0, -1.0).finished();
  CHECK(d.dot(q_tilde * d) == doctest::Approx(4.0));
}

TEST_CASE("equivalent weight rejects an indefinite equity weight")
{
  const auto s = build_equity_matrices(1, 2);
  CHECK_THROWS_AS((void)build_qtilde({Matrix::Identity(1, 1), Matrix::Identity(1, 1)},
                    {Matrix::Identity(1, 1), -Matrix::Identity(1, 1)}, s),
    std::invalid_argument);
}

TEST_CASE("effective weights apply the scaling factors")
{
  const auto sc = make_preset("two-system");
  const auto w = effective_weights(sc, sc.weights);
  CHECK(w.rho[0] == doctest::Approx(0.3));
  CHECK(w.w[1](0, 0) == doctest::Approx(10.0));
  // Q = 1, W = 10: Qtilde = I + 10 * (S1'S1 + S2'S2) = I + 5 [[1, -1], [-1, 1]]
  CHECK(w.q_tilde.isApprox((Matrix(2, 2) << 6.0, -5.0, -5.0, 6.0).finished()));
}

TEST_CASE("class weights are shared inside a class")
{
  auto sc = make_preset("motion-two-class");
  sc.weights.rho_bar = {1.0, 4.0};
  const auto cw = expand_class_weights(sc);
  REQUIRE(cw.rho.size() == 8);
  for (int i = 0; i < 4; ++i) { CHECK(cw.rho[i] == doctest::Approx(0.1)); }
  for (int i = 4; i < 8; ++i) { CHECK(cw.rho[i] == doctest::Approx(0.4)); }
}

TEST_CASE("layout and constraint blocks")
{
  const auto sc = make_preset("two-system");
  const auto inst = assemble_ocp(sc, stacked_initial(sc), 10.0, sc.weights);
  const auto & ly = inst.layout;
  CHECK(ly.num_state_vars() == 21 * 2);
  CHECK(ly.num_input_vars() == 21 * 2);
  CHECK(ly.num_budget_vars() == 0);
  CHECK(ly.size == 42 + 42 + 84 + 8 + 2);
  for (const char * name : {"initial_condition", "dynamics", "terminal_equilibrium", "input_split"}) {
    CHECK(inst.equality_block(name) != nullptr);
  }
  REQUIRE(inst.inequality_block("allocation") != nullptr);
  CHECK(inst.inequality_block("allocation")->rows == 21);
  CHECK(inst.equality_block("budget_dynamics") == nullptr);
  CHECK(inst.dc_penalties.size() == 42);

  SUBCASE("in-horizon budget adds budget states")
  {
    const auto with_budget = assemble_ocp(sc, stacked_initial(sc), 10.0, sc.weights, {true, EqualityFormulation::TwoSidedDC});
    CHECK(with_budget.layout.num_budget_vars() == 21);
    REQUIRE(with_budget.equality_block("budget_dynamics") != nullptr);
    CHECK(with_budget.equality_block("budget_dynamics")->rows == 20);
    CHECK(with_budget.inequality_block("budget_nonnegativity") != nullptr);
  }
  SUBCASE("hinge formulation adds one variable per stage and system")
  {
    const auto hinge = assemble_ocp(sc, stacked_initial(sc), 10.0, sc.weights, {false, EqualityFormulation::ConvexHinge});
    CHECK(hinge.layout.num_hinge_vars() == 42);
    CHECK(hinge.inequality_block("hinge") != nullptr);
  }
  SUBCASE("zero budget pins the inputs")
  {
    const auto none = assemble_ocp(sc, stacked_initial(sc), 0.0, sc.weights);
    CHECK(none.equality_block("zero_input") != nullptr);
    CHECK(none.inequality_block("allocation") == nullptr);
  }
  CHECK_THROWS_AS((void)assemble_ocp(sc, stacked_initial(sc), -1.0, sc.weights), std::invalid_argument);
}

TEST_CASE("pack and extract are inverse and the transcription reproduces the exact cost")
{
  auto sc = make_preset("two-system-ample");
  sc.horizon_l = 4;
  const auto ens = build_ensemble(sc);
  const Vector x0 = stacked_initial(sc);
  std::vector<Vector> inputs = {(Vector(2) << 9.0, 8.0).finished(), (Vector(2) << 12.0, 2.0).finished(),
    (Vector(2) << -1.0, 3.0).finished(), (Vector(2) << 12.0, 2.0).finished(), (Vector(2) << 12.0, 2.0).finished()};
  const auto traj = rollout(ens, x0, inputs);
  Trajectories t = traj;
  t.eps_x = (t.states.back() - ens.x_s).lpNorm<1>();
  t.eps_u = (t.inputs.back() - ens.u_s).lpNorm<1>();
  const auto inst = assemble_ocp(sc, x0, 20.0, sc.weights);
  const Vector z = inst.pack(t);
  const auto back = inst.extract(z);
  for (int k = 0; k <= sc.horizon_l; ++k) {
    CHECK((back.states[k] - t.states[k]).norm() == doctest::Approx(0.0));
    CHECK((back.inputs[k] - t.inputs[k]).norm() == doctest::Approx(0.0));
  }

  const auto exact = eval_cost_terms(t, sc, effective_weights(sc, sc.weights), 20.0);
  CHECK(inst.surrogate_objective(z) == doctest::Approx(exact.total).epsilon(1e-12));

  // the terminal equilibrium only holds if x_L is an equilibrium for u_L
  const double terminal_gap = (ens.a * t.states.back() + ens.b * t.inputs.back() - t.states.back()).lpNorm<Eigen::Infinity>();
  CHECK(inst.max_violation(z) == doctest::Approx(terminal_gap).epsilon(1e-9));
}

TEST_CASE("an equilibrium trajectory is feasible with zero slack")
{
  const auto sc = make_preset("two-system-ample");
  const auto ens = build_ensemble(sc);
  Trajectories t;
  for (int k = 0; k <= sc.horizon_l; ++k) {
    t.states.push_back(ens.x_s);
    t.inputs.push_back(ens.u_s);
  }
  const auto inst = assemble_ocp(sc, ens.x_s, 20.0, sc.weights);
  CHECK(inst.max_violation(inst.pack(t)) <= 1e-12);
  const auto c = eval_cost_terms(t, sc, effective_weights(sc, sc.weights), 20.0);
  CHECK(c.j_p == 0.0);
  CHECK(c.j_e == 0.0);
  // (12 - 10)^2 + (2 - 10)^2 = 68 per stage, weight 0.3
  CHECK(c.j_u == doctest::Approx(20 * 0.3 * 68.0));
  CHECK(c.terminal_v == doctest::Approx(0.1 * 0.3 * 68.0));
}

TEST_CASE("cost evaluation rejects wrong trajectory lengths")
{
  const auto sc = make_preset("two-system");
  Trajectories t;
  t.states.assign(3, Vector::Zero(2));
  t.inputs.assign(3, Vector::Zero(2));
  CHECK_THROWS_AS((void)eval_cost_terms(t, sc, effective_weights(sc, sc.weights), 10.0), std::invalid_argument);
}
