#pragma once

/**
 * @file
 * @brief Sparse convex QP backend (primal-dual interior point).
 *
 * Solves
 *
 *     min  0.5 z' P z + q' z + c
 *     s.t. A z  = b
 *          G z <= h
 *
 * with P symmetric positive semidefinite. Only the lower-or-upper symmetric
 * content of P matters; the solver symmetrizes on entry.
 */

#include <Eigen/Sparse>

#include <optional>

#include "fairmpc/model.hpp"

namespace fairmpc {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

struct QpProblem
{
  SparseMatrix p;
  Vector q;
  double constant = 0.0;
  SparseMatrix a_eq;
  Vector b_eq;
  SparseMatrix g_ineq;
  Vector h_ineq;

  [[nodiscard]] int num_variables() const { return static_cast<int>(q.size()); }
  [[nodiscard]] double objective(const Vector & z) const;
};

struct QpSettings
{
  /// KKT tolerance on scaled residuals and complementarity
  double tolerance = 1e-8;
  int max_iterations = 100;
  /// static regularization of the KKT system, removed by iterative refinement
  double regularization = 1e-10;
  int refinement_steps = 3;
  /// run a phase-I problem to certify infeasibility when the main solve fails
  bool certify_infeasibility = true;
};

enum class QpStatus { Solved, Infeasible, MaxIterations, NumericalError };

/// Farkas certificate: A'y + G'lambda = 0, lambda >= 0, b'y + h'lambda < 0.
struct InfeasibilityCertificate
{
  Vector y_eq;
  Vector lambda_ineq;
  double farkas_value = 0.0;  // b'y + h'lambda, negative
  double violation = 0.0;     // smallest achievable max inequality violation
};

struct QpResult
{
  QpStatus status = QpStatus::NumericalError;
  Vector z;
  Vector y_eq;
  Vector lambda_ineq;
  double objective = 0.0;
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double gap = 0.0;
  std::optional<InfeasibilityCertificate> certificate;
};

[[nodiscard]] QpResult solve_qp(const QpProblem & problem, const QpSettings & settings = {});

[[nodiscard]] const char * to_string(QpStatus s);

}  // namespace fairmpc
