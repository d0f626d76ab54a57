#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace fairmpc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Discrete-time LTI plant x+ = A x + B u.
struct LtiSystem
{
  Matrix a_matrix;
  Matrix b_matrix;
  std::string label;

  [[nodiscard]] int state_dim() const { return static_cast<int>(a_matrix.rows()); }
  [[nodiscard]] int input_dim() const { return static_cast<int>(b_matrix.cols()); }
};

/// Eigenvalue (PBH) test: every eigenvalue with |lambda| >= 1 must leave [A - lambda I | B] full row rank.
[[nodiscard]] bool is_stabilizable(const LtiSystem & system, double tol = 1e-9);

struct EquilibriumTarget
{
  Vector x_s;
  Vector u_s;
};

/**
 * @brief Polytope { z : H z <= h }.
 *
 * A set with zero rows is the whole space; its dimension is carried by the
 * column count of h_matrix.
 */
struct PolytopeSet
{
  Matrix h_matrix;
  Vector h_vector;

  [[nodiscard]] static PolytopeSet unconstrained(int dim);
  /// Axis-aligned box lo <= z <= hi.
  [[nodiscard]] static PolytopeSet box(const Vector & lo, const Vector & hi);

  [[nodiscard]] int dim() const { return static_cast<int>(h_matrix.cols()); }
  [[nodiscard]] int rows() const { return static_cast<int>(h_matrix.rows()); }
  [[nodiscard]] bool is_unconstrained() const { return h_matrix.rows() == 0; }

  [[nodiscard]] bool contains(const Vector & z, double tol = 0.0) const;
  /// Strict interior: H z < h - margin componentwise.
  [[nodiscard]] bool contains_in_interior(const Vector & z, double margin = 1e-9) const;
};

enum class BudgetMode { ConstantPerStep, Depleting, DepletingInHorizon };

struct BudgetPolicy
{
  BudgetMode mode = BudgetMode::ConstantPerStep;
  double u_bar_0 = 1.0;
};

/**
 * @brief Raw (unscaled) penalties of the fair tracking problem.
 *
 * rho_bar and w_bar hold one entry per class when the scenario defines
 * classes, otherwise one entry per system. Effective penalties are
 * rho = gamma_u * rho_bar and W = gamma_e * w_bar.
 */
struct WeightSet
{
  std::vector<Matrix> q_weights;
  std::vector<double> rho_bar;
  std::vector<Matrix> w_bar;
  double gamma_u = 1.0;
  Matrix gamma_e;  // n x n, a scalar factor is stored as s * I
  double beta = 1.0;
  double lambda_x = 1.0;
  double lambda_u = 1.0;
};

struct Scenario
{
  std::string name;
  std::vector<LtiSystem> systems;
  std::vector<EquilibriumTarget> targets;
  std::vector<PolytopeSet> input_sets;
  std::vector<PolytopeSet> state_sets;
  BudgetPolicy budget;
  WeightSet weights;
  int horizon_l = 1;
  int sim_steps_t = 1;
  std::vector<Vector> initial_states;
  std::optional<std::vector<std::vector<int>>> classes;  // 0-based system indices

  [[nodiscard]] int num_systems() const { return static_cast<int>(systems.size()); }
  [[nodiscard]] int state_dim() const { return systems.empty() ? 0 : systems.front().state_dim(); }
  [[nodiscard]] int input_dim() const { return systems.empty() ? 0 : systems.front().input_dim(); }
  /// Number of weight groups: classes when present, systems otherwise.
  [[nodiscard]] int num_weight_groups() const;
  /// Weight group (class index or system index) of system i.
  [[nodiscard]] int weight_group_of(int i) const;
};

/// Block-diagonal stacked dynamics of all systems.
struct EnsembleModel
{
  int num_systems = 0;
  int n = 0;
  int m = 0;
  Matrix a;
  Matrix b;
  Vector x_s;
  Vector u_s;

  [[nodiscard]] int nx() const { return n * num_systems; }
  [[nodiscard]] int nu() const { return m * num_systems; }
};

/// Throws std::invalid_argument naming the offending system on dimension mismatch.
[[nodiscard]] EnsembleModel build_ensemble(const Scenario & scenario);

struct EquilibriumInput
{
  std::optional<Vector> u_s;  // empty when no exact equilibrium input exists
  double residual = 0.0;      // 1-norm of (I - A) x_s - B u_s at the least-squares solution
};

/// Minimum-norm u_s solving (I - A) x_s = B u_s; infeasible when the residual 1-norm exceeds 1e-8.
[[nodiscard]] EquilibriumInput compute_equilibrium_input(const LtiSystem & system, const Vector & x_s);

struct ValidationIssue
{
  std::string code;
  std::string message;
  std::optional<int> system;
};

struct ValidationReport
{
  std::vector<ValidationIssue> errors;
  std::vector<ValidationIssue> warnings;

  [[nodiscard]] bool ok() const { return errors.empty(); }
  [[nodiscard]] bool has_error(const std::string & code) const;
  [[nodiscard]] bool has_warning(const std::string & code) const;
};

[[nodiscard]] ValidationReport validate_scenario(const Scenario & scenario);

/// A x + B u. Throws std::invalid_argument on dimension mismatch.
[[nodiscard]] Vector plant_step(const LtiSystem & system, const Vector & x, const Vector & u);
[[nodiscard]] Vector plant_step(const EnsembleModel & ensemble, const Vector & x, const Vector & u);

/// Smallest eigenvalue of the symmetric part of m.
[[nodiscard]] double min_symmetric_eigenvalue(const Matrix & m);

}  // namespace fairmpc
