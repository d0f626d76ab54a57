#include "fairmpc/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fairmpc {

namespace {

constexpr double kRejectSlack = 1e-9;

std::vector<int> sign_pattern(const std::vector<Vector> & inputs)
{
  std::vector<int> out;
  for (const auto & u : inputs) {
    const double thresh = 1e-7 * std::max(1.0, u.size() ? u.cwiseAbs().maxCoeff() : 0.0);
    for (Eigen::Index j = 0; j < u.size(); ++j) { out.push_back(u(j) > thresh ? 1 : (u(j) < -thresh ? -1 : 0)); }
  }
  return out;
}

bool has_concave_part(const OcpInstance & inst)
{
  if (inst.formulation != EqualityFormulation::TwoSidedDC) { return false; }
  return std::any_of(inst.dc_penalties.begin(), inst.dc_penalties.end(),
    [](const DcPenalty & p) { return p.weight * p.target > 0.0; });
}

double true_objective(const OcpInstance & inst, const Trajectories & traj)
{
  return eval_cost_terms(traj, inst.scenario, inst.weights, inst.u_bar_t).total;
}

SolveResult make_result(const OcpInstance & inst, const SubproblemSolution & sub)
{
  const auto & ly = inst.layout;
  SolveResult r;
  r.num_systems = ly.num_systems;
  r.formulation = inst.formulation;
  r.trajectories = sub.trajectories;
  r.z = sub.z;
  r.raw_split_tightness = sub.raw_split_tightness;
  for (int k = 0; k <= ly.horizon; ++k) {
    r.u_plus.emplace_back(sub.z.segment(ly.u_plus(k), ly.nu()));
    r.u_minus.emplace_back(sub.z.segment(ly.u_minus(k), ly.nu()));
    r.split_tightness = std::max(r.split_tightness, r.u_plus.back().cwiseMin(r.u_minus.back()).maxCoeff());
  }
  r.cost = eval_cost_terms(sub.trajectories, inst.scenario, inst.weights, inst.u_bar_t);
  return r;
}

}  // namespace

void validate_settings(const CcpSettings & s)
{
  if (s.max_outer_iterations < 1) { throw std::invalid_argument("CcpSettings: max_outer_iterations must be at least 1"); }
  if (!(s.stationarity_tolerance > 0.0) || !(s.split_tightness_tolerance > 0.0) || !(s.qp_tolerance > 0.0)) {
    throw std::invalid_argument("CcpSettings: tolerances must be positive");
  }
  if (s.qp_max_iterations < 1) { throw std::invalid_argument("CcpSettings: qp_max_iterations must be at least 1"); }
}

const char * to_string(SolveStatus s)
{
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::MaxIterations: return "max_iterations";
    case SolveStatus::Infeasible: return "infeasible";
  }
  return "unknown";
}

SubproblemSolution solve_convex_subproblem(
  const OcpInstance & instance, const std::vector<Vector> & linearization_inputs, const CcpSettings & settings)
{
  const auto & ly = instance.layout;
  QpProblem qp = instance.qp;

  if (instance.formulation == EqualityFormulation::TwoSidedDC && !linearization_inputs.empty()) {
    if (static_cast<int>(linearization_inputs.size()) != ly.horizon + 1) {
      throw std::invalid_argument("solve_convex_subproblem: linearization needs L+1 inputs");
    }
    const auto sigma = sign_pattern(linearization_inputs);
    for (const auto & p : instance.dc_penalties) {
      const double g = 2.0 * p.weight * p.target;
      for (int j = 0; j < ly.m; ++j) {
        const int ch = p.system * ly.m + j;
        const double sj = sigma[static_cast<std::size_t>(p.stage * ly.nu() + ch)];
        qp.q(ly.u_plus(p.stage) + ch) -= g * sj;
        qp.q(ly.u_minus(p.stage) + ch) += g * sj;
      }
    }
  }

  QpSettings qs;
  qs.tolerance = settings.qp_tolerance;
  qs.max_iterations = settings.qp_max_iterations;
  const QpResult res = solve_qp(qp, qs);

  SubproblemSolution out;
  out.status = res.status;
  out.certificate = res.certificate;
  if (res.z.size() != ly.size) { return out; }

  for (int k = 0; k <= ly.horizon; ++k) {
    const Vector both = res.z.segment(ly.u_plus(k), ly.nu()).cwiseMin(res.z.segment(ly.u_minus(k), ly.nu()));
    out.raw_split_tightness = std::max(out.raw_split_tightness, both.maxCoeff());
    out.raw_u_plus.emplace_back(res.z.segment(ly.u_plus(k), ly.nu()));
    out.raw_u_minus.emplace_back(res.z.segment(ly.u_minus(k), ly.nu()));
  }
  out.trajectories = instance.extract(res.z);
  out.z = instance.pack(out.trajectories);
  return out;
}

SolveResult solve_fair_mpc(
  const OcpInstance & instance, const CcpSettings & settings, const std::optional<Trajectories> & warm_start)
{
  validate_settings(settings);
  const auto & ly = instance.layout;
  const bool concave = has_concave_part(instance);

  std::vector<Vector> lin;
  double best_f = std::numeric_limits<double>::infinity();
  std::optional<Trajectories> feasible_warm;
  if (warm_start && static_cast<int>(warm_start->inputs.size()) == ly.horizon + 1
      && static_cast<int>(warm_start->states.size()) == ly.horizon + 1) {
    lin = warm_start->inputs;
    const Vector zw = instance.pack(*warm_start);
    const double scale = 1.0 + zw.lpNorm<Eigen::Infinity>();
    if (instance.max_violation(zw) <= 1e-7 * scale) {
      feasible_warm = warm_start;
      best_f = true_objective(instance, *warm_start);
    }
  }

  std::optional<SubproblemSolution> best;
  bool converged = false;
  int outer = 0;
  std::string diagnosis;

  for (int it = 0; it < settings.max_outer_iterations; ++it) {
    auto sub = solve_convex_subproblem(instance, lin, settings);
    ++outer;
    if (sub.status == QpStatus::Infeasible) {
      SolveResult r;
      r.num_systems = ly.num_systems;
      r.formulation = instance.formulation;
      r.status = SolveStatus::Infeasible;
      r.outer_iterations = outer;
      r.certificate = sub.certificate;
      r.diagnosis = "convex subproblem infeasible";
      return r;
    }
    if (sub.status != QpStatus::Solved) {
      diagnosis = std::string("QP backend stopped with status ") + to_string(sub.status);
      break;
    }
    const double f = true_objective(instance, sub.trajectories);
    if (std::isfinite(best_f) && f > best_f + kRejectSlack * std::max(1.0, std::abs(best_f))) {
      // the majorant guarantees descent, so an increase is numerical noise: keep the best iterate
      converged = true;
      break;
    }
    const double decrease = best_f - f;
    const auto previous_sign = sign_pattern(lin);
    best_f = f;
    best = std::move(sub);

    if (!concave) {
      converged = true;
      break;
    }
    if (decrease <= settings.stationarity_tolerance * std::max(1.0, std::abs(f))) {
      converged = true;
      break;
    }
    if (!lin.empty() && sign_pattern(best->trajectories.inputs) == previous_sign) {
      // same sign pattern means the same majorant, hence the same minimizer
      converged = true;
      break;
    }
    lin = best->trajectories.inputs;
  }

  SolveResult r;
  if (best) {
    r = make_result(instance, *best);
  } else if (feasible_warm) {
    SubproblemSolution w;
    w.trajectories = *feasible_warm;
    w.z = instance.pack(*feasible_warm);
    r = make_result(instance, w);
  } else {
    r.num_systems = ly.num_systems;
    r.formulation = instance.formulation;
    r.status = SolveStatus::MaxIterations;
    r.outer_iterations = outer;
    r.diagnosis = diagnosis.empty() ? "no iterate available" : diagnosis;
    return r;
  }

  r.outer_iterations = outer;
  r.status = converged ? SolveStatus::Optimal : SolveStatus::MaxIterations;
  r.diagnosis = diagnosis;
  if (r.status == SolveStatus::Optimal && solution_residuals(instance, r.trajectories).max() > 1e-6) {
    r.status = SolveStatus::MaxIterations;
    r.diagnosis = "returned point violates constraints beyond 1e-6";
  }
  return r;
}

TightnessReport check_exactness(const SolveResult & result, double tolerance)
{
  TightnessReport rep;
  const int big_n = std::max(1, result.num_systems);
  for (std::size_t k = 0; k < result.u_plus.size() && k < result.u_minus.size(); ++k) {
    const Vector & up = result.u_plus[k];
    const Vector & um = result.u_minus[k];
    if (up.size() == 0) { continue; }
    rep.split_tightness = std::max(rep.split_tightness, up.cwiseMin(um).maxCoeff());
    const Vector u = up - um;
    const auto m = static_cast<int>(up.size()) / big_n;
    for (int i = 0; i < big_n; ++i) {
      const double s = up.segment(i * m, m).sum() + um.segment(i * m, m).sum();
      rep.surrogate_excess = std::max(rep.surrogate_excess, s - u.segment(i * m, m).lpNorm<1>());
    }
  }
  rep.flagged = rep.split_tightness > tolerance || rep.surrogate_excess > tolerance;
  if (result.formulation == EqualityFormulation::ConvexHinge) {
    rep.note = "hinge penalty is flat below the budget share; padded splits there do not change the cost";
  } else if (rep.flagged) {
    rep.note = "surrogate effort exceeds the true 1-norm";
  }
  return rep;
}

double SolutionResiduals::max() const
{
  return std::max({initial_condition, dynamics, terminal_equilibrium, allocation, input_set, state_set, terminal_bound});
}

SolutionResiduals solution_residuals(const OcpInstance & instance, const Trajectories & traj)
{
  const auto & ens = instance.ensemble;
  const int l = instance.layout.horizon;
  const int n = ens.n;
  const int m = ens.m;
  SolutionResiduals r;
  r.initial_condition = (traj.states[0] - instance.x_t).lpNorm<Eigen::Infinity>();
  for (int k = 0; k < l; ++k) {
    r.dynamics = std::max(r.dynamics,
      (traj.states[k + 1] - ens.a * traj.states[k] - ens.b * traj.inputs[k]).lpNorm<Eigen::Infinity>());
  }
  r.terminal_equilibrium =
    (ens.a * traj.states[l] + ens.b * traj.inputs[l] - traj.states[l]).lpNorm<Eigen::Infinity>();

  double budget = instance.u_bar_t;
  for (int k = 0; k <= l; ++k) {
    const double spent = traj.inputs[k].lpNorm<1>();
    r.allocation = std::max(r.allocation, spent - budget);
    if (instance.layout.has_budget_states) { budget -= spent; }
  }
  const auto & sc = instance.scenario;
  for (int k = 0; k <= l; ++k) {
    for (int i = 0; i < ens.num_systems; ++i) {
      if (!sc.input_sets.empty() && sc.input_sets[i].rows() > 0) {
        const auto & set = sc.input_sets[i];
        r.input_set = std::max(r.input_set, (set.h_matrix * traj.inputs[k].segment(i * m, m) - set.h_vector).maxCoeff());
      }
      if (!sc.state_sets.empty() && sc.state_sets[i].rows() > 0) {
        const auto & set = sc.state_sets[i];
        r.state_set = std::max(r.state_set, (set.h_matrix * traj.states[k].segment(i * n, n) - set.h_vector).maxCoeff());
      }
    }
  }
  r.terminal_bound = std::max({0.0, (traj.states[l] - ens.x_s).lpNorm<1>() - traj.eps_x,
    (traj.inputs[l] - ens.u_s).lpNorm<1>() - traj.eps_u});
  return r;
}

Trajectories shift_warm_start(const Trajectories & previous, const EnsembleModel & ensemble, const Vector & x_t)
{
  Trajectories out;
  const auto len = previous.inputs.size();
  if (len == 0) { return out; }
  for (std::size_t k = 1; k < len; ++k) { out.inputs.push_back(previous.inputs[k]); }
  out.inputs.push_back(previous.inputs.back());
  out.states.push_back(x_t);
  for (std::size_t k = 0; k + 1 < len; ++k) { out.states.push_back(plant_step(ensemble, out.states.back(), out.inputs[k])); }
  out.eps_x = previous.eps_x;
  out.eps_u = previous.eps_u;
  return out;
}

}  // namespace fairmpc
