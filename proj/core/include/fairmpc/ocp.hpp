#pragma once

/**
 * @file
 * @brief Transcription of the fair receding-horizon problem into a sparse QP.
 *
 * Decision vector layout, in order:
 *
 *   x_0..x_L          stacked ensemble states          (L+1) * nN
 *   u_0..u_L          stacked ensemble inputs          (L+1) * mN
 *   u+_0..u+_L        positive input parts             (L+1) * mN
 *   u-_0..u-_L        negative input parts             (L+1) * mN
 *   dx+, dx-          split of x_L - x_s               2 * nN
 *   du+, du-          split of u_L - u_s               2 * mN
 *   eps_x, eps_u      terminal slacks                  2
 *   U_0..U_L          in-horizon budgets (optional)    L+1
 *   h_{k,i}           hinge variables (optional)       (L+1) * N
 *
 * The equality penalty rho (||u||_1 - c)^2 is kept as a difference of convex
 * functions: rho s^2 + rho c^2 lives in the QP, the concave part
 * -2 rho c ||u||_1 is listed in dc_penalties and linearized by the solver.
 */

#include <string>
#include <vector>

#include "fairmpc/model.hpp"
#include "fairmpc/qp.hpp"

namespace fairmpc {

enum class EqualityFormulation { TwoSidedDC, ConvexHinge };

struct OcpOptions
{
  bool budget_in_horizon = false;
  EqualityFormulation equality_formulation = EqualityFormulation::TwoSidedDC;
};

/// Per-system penalties after class expansion and scaling, plus the equivalent state weight.
struct EffectiveWeights
{
  std::vector<Matrix> q;
  std::vector<double> rho;
  std::vector<Matrix> w;
  Matrix q_tilde;
  double beta = 1.0;
  double lambda_x = 1.0;
  double lambda_u = 1.0;
};

/// S^i = [-1/N I, ..., (N-1)/N I, ..., -1/N I], block (N-1)/N at position i.
[[nodiscard]] std::vector<Matrix> build_equity_matrices(int n, int num_systems);

/// diag(Q^1..Q^N) + sum_i S^i' W^i S^i. Throws std::invalid_argument if a W^i is not PSD.
[[nodiscard]] Matrix build_qtilde(
  const std::vector<Matrix> & q_weights, const std::vector<Matrix> & w_weights, const std::vector<Matrix> & s_matrices);

struct ClassWeights
{
  std::vector<double> rho;  // gamma_u * rho_bar of the owning class
  std::vector<Matrix> w;    // gamma_e * w_bar of the owning class
};

/// Per-system (rho^i, W^i) from class- or system-indexed raw weights.
[[nodiscard]] ClassWeights expand_class_weights(const Scenario & scenario);
[[nodiscard]] ClassWeights expand_class_weights(const Scenario & scenario, const WeightSet & weights);

[[nodiscard]] EffectiveWeights effective_weights(const Scenario & scenario, const WeightSet & weights);

/// Predicted trajectories over the horizon: L+1 stacked states and L+1 stacked inputs.
struct Trajectories
{
  std::vector<Vector> states;
  std::vector<Vector> inputs;
  double eps_x = 0.0;
  double eps_u = 0.0;
};

struct CostBreakdown
{
  double j_p = 0.0;
  double j_u = 0.0;
  double j_e = 0.0;
  double terminal_v = 0.0;
  double slack_penalty = 0.0;
  double total = 0.0;
};

/**
 * @brief Exact cost of a trajectory, using true input 1-norms.
 *
 * Stage terms run over k = 0..L-1, the terminal cost is
 * beta * (||x_L - x_s||^2_Qtilde + sum_i rho^i (||u_L^i||_1 - U/N)^2).
 */
[[nodiscard]] CostBreakdown eval_cost_terms(
  const Trajectories & traj, const Scenario & scenario, const EffectiveWeights & weights, double u_bar_t);

/// Index bookkeeping for the decision vector.
struct VariableLayout
{
  int horizon = 0;
  int num_systems = 0;
  int n = 0;
  int m = 0;
  bool has_budget_states = false;
  bool has_hinge = false;

  int states_begin = 0;
  int inputs_begin = 0;
  int u_plus_begin = 0;
  int u_minus_begin = 0;
  int term_x_plus_begin = 0;
  int term_x_minus_begin = 0;
  int term_u_plus_begin = 0;
  int term_u_minus_begin = 0;
  int eps_x_index = 0;
  int eps_u_index = 0;
  int budget_begin = 0;
  int hinge_begin = 0;
  int size = 0;

  [[nodiscard]] int nx() const { return n * num_systems; }
  [[nodiscard]] int nu() const { return m * num_systems; }
  [[nodiscard]] int state(int k) const { return states_begin + k * nx(); }
  [[nodiscard]] int input(int k) const { return inputs_begin + k * nu(); }
  [[nodiscard]] int u_plus(int k) const { return u_plus_begin + k * nu(); }
  [[nodiscard]] int u_minus(int k) const { return u_minus_begin + k * nu(); }
  [[nodiscard]] int budget(int k) const { return budget_begin + k; }
  [[nodiscard]] int hinge(int k, int i) const { return hinge_begin + k * num_systems + i; }

  [[nodiscard]] int num_state_vars() const { return (horizon + 1) * nx(); }
  [[nodiscard]] int num_input_vars() const { return (horizon + 1) * nu(); }
  [[nodiscard]] int num_split_vars() const { return 2 * (horizon + 1) * nu(); }
  [[nodiscard]] int num_terminal_split_vars() const { return 2 * (nx() + nu()); }
  [[nodiscard]] int num_budget_vars() const { return has_budget_states ? horizon + 1 : 0; }
  [[nodiscard]] int num_hinge_vars() const { return has_hinge ? (horizon + 1) * num_systems : 0; }
};

struct ConstraintBlock
{
  std::string name;
  int row_begin = 0;
  int rows = 0;
};

/// weight * (||u_stage^system||_1 - target)^2
struct DcPenalty
{
  int system = 0;
  int stage = 0;
  double weight = 0.0;
  double target = 0.0;
};

struct OcpInstance
{
  VariableLayout layout;
  QpProblem qp;
  std::vector<DcPenalty> dc_penalties;
  std::vector<ConstraintBlock> equality_blocks;
  std::vector<ConstraintBlock> inequality_blocks;
  EqualityFormulation formulation = EqualityFormulation::TwoSidedDC;
  EnsembleModel ensemble;
  EffectiveWeights weights;
  double u_bar_t = 0.0;
  Vector x_t;
  Scenario scenario;

  [[nodiscard]] const ConstraintBlock * equality_block(const std::string & name) const;
  [[nodiscard]] const ConstraintBlock * inequality_block(const std::string & name) const;
  [[nodiscard]] int count_equality_blocks(const std::string & name) const;

  [[nodiscard]] Trajectories extract(const Vector & z) const;
  /// Decision vector for a trajectory with tight splits, budgets rolled forward and hinges at their minimum.
  [[nodiscard]] Vector pack(const Trajectories & traj) const;
  /// Largest violation over all equality and inequality rows.
  [[nodiscard]] double max_violation(const Vector & z) const;
  /// QP objective plus the concave parts evaluated on the split surrogate s = 1'(u+ + u-).
  [[nodiscard]] double surrogate_objective(const Vector & z) const;
  /// Sum over splits of the surrogate effort of system i at stage k.
  [[nodiscard]] double surrogate_effort(const Vector & z, int stage, int system) const;
};

/// Throws std::invalid_argument when u_bar_t < 0 or the horizon is below 1.
[[nodiscard]] OcpInstance assemble_ocp(const Scenario & scenario, const Vector & x_t, double u_bar_t,
  const WeightSet & active_weights, const OcpOptions & options = {});

}  // namespace fairmpc
