#pragma once

/**
 * @file
 * @brief JSON scenario files.
 *
 * Layout:
 *
 *     {
 *       "name": "optional",
 *       "systems": [{"a": [[..]], "b": [[..]], "x0": [..], "xs": [..],
 *                    "us": [..], "input_set": {"H": [[..]], "h": [..]}, "state_set": {...}}],
 *       "budget": {"mode": "ConstantPerStep" | "Depleting" | "DepletingInHorizon", "u_bar": 10},
 *       "weights": {"q": [[[..]]], "rho_bar": [..], "w_bar": [[[..]]], "gamma_u": 0.1,
 *                   "gamma_e": 10 or [[..]], "beta": 0.1, "lambda_x": 0.1, "lambda_u": 0.1},
 *       "horizon": 20, "sim_steps": 20, "classes": [[0, 1], [2]]
 *     }
 *
 * Matrices are row-major nested arrays. "us" is optional and computed from
 * the dynamics when absent; missing sets mean unconstrained. Class indices
 * are 0-based.
 */

#include <filesystem>
#include <stdexcept>
#include <string>

#include "fairmpc/model.hpp"

namespace fairmpc {

/// Schema or validation failure; path() names the offending field, e.g. "systems[1].b".
class ScenarioError : public std::runtime_error
{
public:
  ScenarioError(std::string path, const std::string & message)
  : std::runtime_error(path.empty() ? message : path + ": " + message), path_(std::move(path))
  {
  }

  [[nodiscard]] const std::string & path() const { return path_; }

private:
  std::string path_;
};

[[nodiscard]] const char * to_string(BudgetMode mode);
[[nodiscard]] BudgetMode parse_budget_mode(const std::string & text);

/// Schema checks only; missing equilibrium inputs are still filled in.
[[nodiscard]] Scenario parse_scenario_json(const std::string & text);
/// parse_scenario_json followed by validate_scenario; throws ScenarioError on the first error.
[[nodiscard]] Scenario scenario_from_json(const std::string & text);
[[nodiscard]] std::string scenario_to_json(const Scenario & scenario, int indent = 2);

[[nodiscard]] Scenario load_scenario_file(const std::filesystem::path & path);
void save_scenario_file(const Scenario & scenario, const std::filesystem::path & path);

}  // namespace fairmpc
