#include "doctest.h"
#include "fairmpc/experiment.hpp"
#include "fairmpc/presets.hpp"
#include "fairmpc/scenario_io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace fairmpc;

TEST_CASE("option parsers")
{
  CHECK(parse_strategy(to_string(Strategy::PerformanceEquity)) == Strategy::PerformanceEquity);
  CHECK(parse_autotune("case-a") == AutotuneMode::CaseA);
  CHECK(parse_equality_mode("hinge") == EqualityFormulation::ConvexHinge);
  CHECK(std::string(to_string(EqualityFormulation::TwoSidedDC)) == "dc");
  CHECK_THROWS_AS((void)parse_strategy("fastest"), std::invalid_argument);
  CHECK_THROWS_AS((void)parse_autotune("case-c"), std::invalid_argument);
  CHECK_THROWS_AS((void)parse_equality_mode("soft"), std::invalid_argument);
}

TEST_CASE("exit codes")
{
  SimulationTrace t;
  CHECK(exit_code_for(t) == 0);
  t.steps.emplace_back();
  t.steps.back().status = SolveStatus::MaxIterations;
  CHECK(exit_code_for(t) == 2);
  t.aborted = true;
  CHECK(exit_code_for(t) == 1);
}

TEST_CASE("trace CSV layout and determinism")
{
  auto sc = make_preset("motion-two-system");
  sc.sim_steps_t = 3;
  const auto a = run_closed_loop(sc);
  const auto b = run_closed_loop(sc);
  std::ostringstream csv_a;
  std::ostringstream csv_b;
  write_trace_csv(csv_a, a);
  write_trace_csv(csv_b, b);
  CHECK(csv_a.str() == csv_b.str());

  std::istringstream lines(csv_a.str());
  std::string header;
  std::getline(lines, header);
  CHECK(header ==
    "t,x1_1,x1_2,x1_3,x1_4,x2_1,x2_2,x2_3,x2_4,u1_1,u1_2,u2_1,u2_2,u_bar_t,rho_bar_t,jain_scaled_t,equity_t,"
    "solver_status");
  int rows = 0;
  for (std::string row; std::getline(lines, row);) {
    ++rows;
    CHECK(row.substr(row.rfind(',') + 1) == "optimal");
  }
  CHECK(rows == 3);
}

TEST_CASE("run writes its artifacts")
{
  auto sc = make_preset("two-system");
  sc.sim_steps_t = 4;
  RunManifest m;
  m.output_dir = std::filesystem::temp_directory_path() / "fairmpc_experiment_test";
  std::filesystem::remove_all(m.output_dir);
  const auto out = run_experiment(sc, m);
  CHECK(out.exit_code == 0);
  for (const char * f : {"trace.csv", "kpi.json", "summary.txt"}) {
    CHECK(std::filesystem::exists(m.output_dir / f));
  }
  std::ifstream kpi(m.output_dir / "kpi.json");
  std::stringstream text;
  text << kpi.rdbuf();
  CHECK(text.str().find("\"h_tau\"") != std::string::npos);
  std::filesystem::remove_all(m.output_dir);
}

TEST_CASE("scenario source lookup")
{
  CHECK(load_scenario("two-system").name == "two-system");
  CHECK_THROWS_AS((void)load_scenario("no-such-thing"), ScenarioError);
}
