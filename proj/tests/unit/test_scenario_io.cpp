#include "doctest.h"
#include "fairmpc/presets.hpp"
#include "fairmpc/scenario_io.hpp"

#include <filesystem>

using namespace fairmpc;

namespace {

const char * kMinimal = R"({
  "systems": [
    {"a": [[0.5]], "b": [[0.1]], "x0": [0], "xs": [2]},
    {"a": [[0.75]], "b": [[0.05]], "x0": [0], "xs": [2]}
  ],
  "budget": {"mode": "ConstantPerStep", "u_bar": 20},
  "weights": {"q": [[[1]], [[1]]], "rho_bar": [1, 1], "w_bar": [[[1]], [[1]]],
              "gamma_u": 0.1, "gamma_e": 10, "beta": 0.1, "lambda_x": 0.1, "lambda_u": 0.1},
  "horizon": 10, "sim_steps": 10
})";

std::string error_path(const std::string & text)
{
  try {
    (void)scenario_from_json(text);
  } catch (const ScenarioError & e) {
    return e.path();
  }
  return "<none>";
}

}  // namespace

TEST_CASE("presets survive a JSON round trip")
{
  for (const auto & p : list_presets()) {
    CAPTURE(p.name);
    const auto sc = make_preset(p.name);
    const auto back = scenario_from_json(scenario_to_json(sc));
    CHECK(back.name == sc.name);
    CHECK(back.num_systems() == sc.num_systems());
    CHECK(back.horizon_l == sc.horizon_l);
    CHECK(back.sim_steps_t == sc.sim_steps_t);
    CHECK(back.budget.mode == sc.budget.mode);
    CHECK(back.budget.u_bar_0 == sc.budget.u_bar_0);
    CHECK(back.classes == sc.classes);
    for (int i = 0; i < sc.num_systems(); ++i) {
      CHECK(back.systems[i].a_matrix == sc.systems[i].a_matrix);
      CHECK(back.systems[i].b_matrix == sc.systems[i].b_matrix);
      CHECK(back.targets[i].u_s == sc.targets[i].u_s);
      CHECK(back.initial_states[i] == sc.initial_states[i]);
      CHECK(back.input_sets[i].h_matrix == sc.input_sets[i].h_matrix);
      CHECK(back.state_sets[i].h_vector == sc.state_sets[i].h_vector);
    }
    CHECK(back.weights.gamma_e == sc.weights.gamma_e);
    CHECK(back.weights.rho_bar == sc.weights.rho_bar);
    CHECK(scenario_to_json(back) == scenario_to_json(sc));
  }
}

TEST_CASE("minimal file fills in equilibrium inputs and a scalar gamma_e")
{
  const auto sc = scenario_from_json(kMinimal);
  REQUIRE(sc.num_systems() == 2);
  CHECK(sc.targets[0].u_s(0) == doctest::Approx(10.0));
  CHECK(sc.targets[1].u_s(0) == doctest::Approx(10.0));
  CHECK(sc.weights.gamma_e(0, 0) == 10.0);
  CHECK(sc.input_sets[0].is_unconstrained());
  CHECK_FALSE(sc.classes.has_value());
}

TEST_CASE("schema errors name the offending field")
{
  std::string text = kMinimal;
  SUBCASE("input matrix rows disagree with the state dimension")
  {
    text.replace(text.find("[[0.05]]"), 8, "[[0.05], [1]]");
    CHECK(error_path(text) == "systems[1].b");
  }
  SUBCASE("input dimension differs between systems")
  {
    text.replace(text.find("[[0.05]]"), 8, "[[0.05, 1]]");
    CHECK(error_path(text) == "systems[1]");
  }
  SUBCASE("unknown budget mode")
  {
    text.replace(text.find("ConstantPerStep"), 15, "Sometimes");
    CHECK(error_path(text) == "budget.mode");
  }
  SUBCASE("missing horizon")
  {
    text.replace(text.find("\"horizon\": 10,"), 14, "");
    CHECK(error_path(text) == "horizon");
  }
  SUBCASE("not JSON at all")
  {
    CHECK_THROWS_AS((void)scenario_from_json("{ nope"), ScenarioError);
  }
}

TEST_CASE("classes are read as 0-based groups")
{
  std::string text = kMinimal;
  text.replace(text.find("\"sim_steps\": 10"), 15, R"("sim_steps": 10, "classes": [[0, 1]])");
  text.replace(text.find("\"rho_bar\": [1, 1]"), 17, R"("rho_bar": [1])");
  text.replace(text.find("\"w_bar\": [[[1]], [[1]]]"), 23, R"("w_bar": [[[1]]])");
  const auto sc = scenario_from_json(text);
  REQUIRE(sc.classes.has_value());
  CHECK(sc.num_weight_groups() == 1);
  CHECK(sc.weight_group_of(1) == 0);
}

TEST_CASE("files on disk")
{
  const auto path = std::filesystem::temp_directory_path() / "fairmpc_scenario_io_test.json";
  save_scenario_file(make_preset("two-system"), path);
  const auto sc = load_scenario_file(path);
  CHECK(sc.name == "two-system");
  std::filesystem::remove(path);
  CHECK_THROWS_AS((void)load_scenario_file(path), ScenarioError);
}

TEST_CASE("budget mode names")
{
  for (auto m : {BudgetMode::ConstantPerStep, BudgetMode::Depleting, BudgetMode::DepletingInHorizon}) {
    CHECK(parse_budget_mode(to_string(m)) == m);
  }
}
