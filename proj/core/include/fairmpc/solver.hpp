#pragma once

/**
 * @file
 * @brief Convex-concave outer loop for the fair receding-horizon problem.
 *
 * Each subproblem keeps the convex part of every equality penalty and
 * replaces the concave part -2 w c ||u||_1 by its linearization
 * -2 w c sign(u_bar)'u at the current linearization inputs u_bar. The
 * linearization is a global majorant, so every accepted iterate lowers
 * the true objective.
 */

#include <optional>
#include <string>
#include <vector>

#include "fairmpc/ocp.hpp"
#include "fairmpc/qp.hpp"

namespace fairmpc {

struct CcpSettings
{
  int max_outer_iterations = 15;
  /// relative objective decrease below which the outer loop stops
  double stationarity_tolerance = 1e-7;
  /// largest accepted componentwise min(u+, u-)
  double split_tightness_tolerance = 1e-7;
  double qp_tolerance = 1e-8;
  int qp_max_iterations = 100;
};

/// Throws std::invalid_argument on nonpositive tolerances or max_outer_iterations < 1.
void validate_settings(const CcpSettings & settings);

enum class SolveStatus { Optimal, MaxIterations, Infeasible };

[[nodiscard]] const char * to_string(SolveStatus s);

struct SubproblemSolution
{
  QpStatus status = QpStatus::NumericalError;
  /// decision vector with splits tightened to u+ = max(u, 0), u- = max(-u, 0)
  Vector z;
  /// largest componentwise min(u+, u-) returned by the QP before tightening
  double raw_split_tightness = 0.0;
  std::vector<Vector> raw_u_plus;
  std::vector<Vector> raw_u_minus;
  Trajectories trajectories;
  std::optional<InfeasibilityCertificate> certificate;
};

/**
 * @brief Solves the convex majorant built around linearization_inputs.
 *
 * linearization_inputs holds L+1 stacked inputs; an empty vector linearizes
 * at zero, which drops the concave part altogether.
 */
[[nodiscard]] SubproblemSolution solve_convex_subproblem(const OcpInstance & instance,
  const std::vector<Vector> & linearization_inputs, const CcpSettings & settings = {});

struct SolveResult
{
  Trajectories trajectories;
  /// splits of the returned point, u+ = max(u, 0) and u- = max(-u, 0)
  std::vector<Vector> u_plus;
  std::vector<Vector> u_minus;
  int num_systems = 1;
  EqualityFormulation formulation = EqualityFormulation::TwoSidedDC;
  CostBreakdown cost;
  SolveStatus status = SolveStatus::Infeasible;
  int outer_iterations = 0;
  double split_tightness = 0.0;
  /// max min(u+, u-) of the final QP before tightening; padding there is free when the effort term is flat
  double raw_split_tightness = 0.0;
  std::optional<InfeasibilityCertificate> certificate;
  std::string diagnosis;
  Vector z;
};

[[nodiscard]] SolveResult solve_fair_mpc(const OcpInstance & instance, const CcpSettings & settings = {},
  const std::optional<Trajectories> & warm_start = std::nullopt);

struct TightnessReport
{
  /// max over stages and channels of min(u+, u-)
  double split_tightness = 0.0;
  /// max over stages and systems of s - ||u||_1
  double surrogate_excess = 0.0;
  bool flagged = false;
  std::string note;
};

[[nodiscard]] TightnessReport check_exactness(const SolveResult & result, double tolerance = 1e-7);

/// Residuals of the returned point evaluated on the unsplit variables.
struct SolutionResiduals
{
  double initial_condition = 0.0;
  double dynamics = 0.0;
  double terminal_equilibrium = 0.0;
  /// max_k (sum_i ||u_k^i||_1 - budget_k), positive when violated
  double allocation = 0.0;
  double input_set = 0.0;
  double state_set = 0.0;
  /// max of ||x_L - x_s||_1 - eps_x and ||u_L - u_s||_1 - eps_u
  double terminal_bound = 0.0;

  [[nodiscard]] double max() const;
};

[[nodiscard]] SolutionResiduals solution_residuals(const OcpInstance & instance, const Trajectories & traj);

/// Drops the first stage and repeats the last input; states are rolled through the ensemble dynamics.
[[nodiscard]] Trajectories shift_warm_start(const Trajectories & previous, const EnsembleModel & ensemble, const Vector & x_t);

}  // namespace fairmpc
