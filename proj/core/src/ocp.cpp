#include "fairmpc/ocp.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace fairmpc {

namespace {

constexpr double kZeroBudget = 1e-12;

Matrix symmetric_part(const Matrix & m) { return 0.5 * (m + m.transpose()); }

/// Row-wise builder for one constraint family (equalities or inequalities).
class RowBuilder
{
public:
  explicit RowBuilder(int num_vars) : num_vars_(num_vars) {}

  int next_row() const { return rows_; }

  void begin_block(const std::string & name) { blocks_.push_back({name, rows_, 0}); }
  void end_block() { blocks_.back().rows = rows_ - blocks_.back().row_begin; }

  int add_row(double rhs)
  {
    rhs_.push_back(rhs);
    return rows_++;
  }
  void add(int row, int col, double value)
  {
    if (value != 0.0) { trip_.emplace_back(row, col, value); }
  }

  SparseMatrix matrix() const
  {
    SparseMatrix m(rows_, num_vars_);
    m.setFromTriplets(trip_.begin(), trip_.end());
    return m;
  }
  Vector rhs() const { return Eigen::Map<const Vector>(rhs_.data(), static_cast<Eigen::Index>(rhs_.size())); }
  const std::vector<ConstraintBlock> & blocks() const { return blocks_; }

private:
  int num_vars_;
  int rows_ = 0;
  std::vector<Triplet> trip_;
  std::vector<double> rhs_;
  std::vector<ConstraintBlock> blocks_;
};

}  // namespace

std::vector<Matrix> build_equity_matrices(int n, int num_systems)
{
  if (n < 1 || num_systems < 1) { throw std::invalid_argument("build_equity_matrices: n and N must be at least 1"); }
  const double inv = 1.0 / num_systems;
  std::vector<Matrix> out;
  out.reserve(static_cast<std::size_t>(num_systems));
  for (int i = 0; i < num_systems; ++i) {
    Matrix s = Matrix::Zero(n, n * num_systems);
    for (int j = 0; j < num_systems; ++j) {
      const double v = (i == j) ? 1.0 - inv : -inv;
      s.block(0, j * n, n, n) = v * Matrix::Identity(n, n);
    }
    out.push_back(std::move(s));
  }
  return out;
}

Matrix build_qtilde(
  const std::vector<Matrix> & q_weights, const std::vector<Matrix> & w_weights, const std::vector<Matrix> & s_matrices)
{
  const auto big_n = static_cast<int>(q_weights.size());
  if (big_n == 0 || w_weights.size() != q_weights.size() || s_matrices.size() != q_weights.size()) {
    throw std::invalid_argument("build_qtilde: need one Q, W and S per system");
  }
  const auto n = static_cast<int>(q_weights.front().rows());
  Matrix qt = Matrix::Zero(n * big_n, n * big_n);
  for (int i = 0; i < big_n; ++i) {
    if (q_weights[i].rows() != n || q_weights[i].cols() != n || w_weights[i].rows() != n || w_weights[i].cols() != n
        || s_matrices[i].rows() != n || s_matrices[i].cols() != n * big_n) {
      throw std::invalid_argument("build_qtilde: dimension mismatch at system " + std::to_string(i));
    }
    const Matrix w = symmetric_part(w_weights[i]);
    if (min_symmetric_eigenvalue(w) < -1e-10 * std::max(1.0, w.norm())) {
      throw std::invalid_argument("build_qtilde: W of system " + std::to_string(i) + " is not positive semidefinite");
    }
    qt.block(i * n, i * n, n, n) += symmetric_part(q_weights[i]);
    qt += s_matrices[i].transpose() * w * s_matrices[i];
  }
  return symmetric_part(qt);
}

ClassWeights expand_class_weights(const Scenario & scenario) { return expand_class_weights(scenario, scenario.weights); }

ClassWeights expand_class_weights(const Scenario & scenario, const WeightSet & weights)
{
  const int big_n = scenario.num_systems();
  const int n = scenario.state_dim();
  const int groups = scenario.num_weight_groups();
  if (static_cast<int>(weights.rho_bar.size()) != groups || static_cast<int>(weights.w_bar.size()) != groups) {
    throw std::invalid_argument(
      "expand_class_weights: expected " + std::to_string(groups) + " rho_bar and w_bar entries");
  }
  const Matrix gamma_e = weights.gamma_e.size() == 0 ? Matrix(Matrix::Identity(n, n)) : weights.gamma_e;
  ClassWeights out;
  for (int i = 0; i < big_n; ++i) {
    const int g = scenario.weight_group_of(i);
    out.rho.push_back(weights.gamma_u * weights.rho_bar[g]);
    out.w.push_back(symmetric_part(gamma_e * weights.w_bar[g]));
  }
  return out;
}

EffectiveWeights effective_weights(const Scenario & scenario, const WeightSet & weights)
{
  const int big_n = scenario.num_systems();
  if (static_cast<int>(weights.q_weights.size()) != big_n) {
    throw std::invalid_argument("effective_weights: expected " + std::to_string(big_n) + " Q weights");
  }
  auto cw = expand_class_weights(scenario, weights);
  EffectiveWeights ew;
  ew.q = weights.q_weights;
  ew.rho = std::move(cw.rho);
  ew.w = std::move(cw.w);
  ew.q_tilde = build_qtilde(ew.q, ew.w, build_equity_matrices(scenario.state_dim(), big_n));
  ew.beta = weights.beta;
  ew.lambda_x = weights.lambda_x;
  ew.lambda_u = weights.lambda_u;
  return ew;
}

CostBreakdown eval_cost_terms(
  const Trajectories & traj, const Scenario & scenario, const EffectiveWeights & weights, double u_bar_t)
{
  const int big_n = scenario.num_systems();
  const int n = scenario.state_dim();
  const int m = scenario.input_dim();
  const int l = scenario.horizon_l;
  if (static_cast<int>(traj.states.size()) != l + 1 || static_cast<int>(traj.inputs.size()) != l + 1) {
    throw std::invalid_argument("eval_cost_terms: expected " + std::to_string(l + 1) + " states and inputs, got "
      + std::to_string(traj.states.size()) + " and " + std::to_string(traj.inputs.size()));
  }
  for (int k = 0; k <= l; ++k) {
    if (traj.states[k].size() != n * big_n || traj.inputs[k].size() != m * big_n) {
      throw std::invalid_argument("eval_cost_terms: wrong vector size at stage " + std::to_string(k));
    }
  }
  const double target = u_bar_t / big_n;

  auto effort_penalty = [&](const Vector & u) {
    double acc = 0.0;
    for (int i = 0; i < big_n; ++i) {
      const double d = u.segment(i * m, m).lpNorm<1>() - target;
      acc += weights.rho[i] * d * d;
    }
    return acc;
  };

  Vector x_s(n * big_n);
  for (int i = 0; i < big_n; ++i) { x_s.segment(i * n, n) = scenario.targets[i].x_s; }

  CostBreakdown c;
  for (int k = 0; k < l; ++k) {
    const Vector dx = traj.states[k] - x_s;
    Vector mean_err = Vector::Zero(n);
    for (int i = 0; i < big_n; ++i) { mean_err += dx.segment(i * n, n); }
    mean_err /= big_n;
    for (int i = 0; i < big_n; ++i) {
      const Vector di = dx.segment(i * n, n);
      c.j_p += di.dot(weights.q[i] * di);
      const Vector dev = di - mean_err;
      c.j_e += dev.dot(weights.w[i] * dev);
    }
    c.j_u += effort_penalty(traj.inputs[k]);
  }
  const Vector dx_l = traj.states[l] - x_s;
  c.terminal_v = weights.beta * (dx_l.dot(weights.q_tilde * dx_l) + effort_penalty(traj.inputs[l]));
  c.slack_penalty = weights.lambda_u * traj.eps_u * traj.eps_u + weights.lambda_x * traj.eps_x * traj.eps_x;
  c.total = c.j_p + c.j_u + c.j_e + c.terminal_v + c.slack_penalty;
  return c;
}

const ConstraintBlock * OcpInstance::equality_block(const std::string & name) const
{
  for (const auto & b : equality_blocks) {
    if (b.name == name) { return &b; }
  }
  return nullptr;
}

const ConstraintBlock * OcpInstance::inequality_block(const std::string & name) const
{
  for (const auto & b : inequality_blocks) {
    if (b.name == name) { return &b; }
  }
  return nullptr;
}

int OcpInstance::count_equality_blocks(const std::string & name) const
{
  return static_cast<int>(
    std::count_if(equality_blocks.begin(), equality_blocks.end(), [&](const auto & b) { return b.name == name; }));
}

Trajectories OcpInstance::extract(const Vector & z) const
{
  const auto & ly = layout;
  Trajectories t;
  for (int k = 0; k <= ly.horizon; ++k) {
    t.states.emplace_back(z.segment(ly.state(k), ly.nx()));
    t.inputs.emplace_back(z.segment(ly.input(k), ly.nu()));
  }
  t.eps_x = z(ly.eps_x_index);
  t.eps_u = z(ly.eps_u_index);
  return t;
}

double OcpInstance::surrogate_effort(const Vector & z, int stage, int system) const
{
  const int m = layout.m;
  return z.segment(layout.u_plus(stage) + system * m, m).sum() + z.segment(layout.u_minus(stage) + system * m, m).sum();
}

Vector OcpInstance::pack(const Trajectories & traj) const
{
  const auto & ly = layout;
  if (static_cast<int>(traj.states.size()) != ly.horizon + 1 || static_cast<int>(traj.inputs.size()) != ly.horizon + 1) {
    throw std::invalid_argument("OcpInstance::pack: trajectory length does not match the horizon");
  }
  Vector z = Vector::Zero(ly.size);
  for (int k = 0; k <= ly.horizon; ++k) {
    const Vector & u = traj.inputs[k];
    z.segment(ly.state(k), ly.nx()) = traj.states[k];
    z.segment(ly.input(k), ly.nu()) = u;
    z.segment(ly.u_plus(k), ly.nu()) = u.cwiseMax(0.0);
    z.segment(ly.u_minus(k), ly.nu()) = (-u).cwiseMax(0.0);
  }
  const Vector dx = traj.states[ly.horizon] - ensemble.x_s;
  const Vector du = traj.inputs[ly.horizon] - ensemble.u_s;
  z.segment(ly.term_x_plus_begin, ly.nx()) = dx.cwiseMax(0.0);
  z.segment(ly.term_x_minus_begin, ly.nx()) = (-dx).cwiseMax(0.0);
  z.segment(ly.term_u_plus_begin, ly.nu()) = du.cwiseMax(0.0);
  z.segment(ly.term_u_minus_begin, ly.nu()) = (-du).cwiseMax(0.0);
  z(ly.eps_x_index) = traj.eps_x;
  z(ly.eps_u_index) = traj.eps_u;
  if (ly.has_budget_states) {
    double u_bar = u_bar_t;
    for (int k = 0; k <= ly.horizon; ++k) {
      z(ly.budget(k)) = u_bar;
      u_bar -= traj.inputs[k].lpNorm<1>();
    }
  }
  if (ly.has_hinge) {
    for (const auto & p : dc_penalties) {
      z(ly.hinge(p.stage, p.system)) = std::max(0.0, surrogate_effort(z, p.stage, p.system) - p.target);
    }
  }
  return z;
}

double OcpInstance::max_violation(const Vector & z) const
{
  double v = 0.0;
  if (qp.a_eq.rows() > 0) { v = std::max(v, (qp.a_eq * z - qp.b_eq).lpNorm<Eigen::Infinity>()); }
  if (qp.g_ineq.rows() > 0) { v = std::max(v, (qp.g_ineq * z - qp.h_ineq).maxCoeff()); }
  return v;
}

double OcpInstance::surrogate_objective(const Vector & z) const
{
  double obj = qp.objective(z);
  if (formulation == EqualityFormulation::TwoSidedDC) {
    for (const auto & p : dc_penalties) { obj -= 2.0 * p.weight * p.target * surrogate_effort(z, p.stage, p.system); }
  }
  return obj;
}

OcpInstance assemble_ocp(const Scenario & scenario, const Vector & x_t, double u_bar_t, const WeightSet & active_weights,
  const OcpOptions & options)
{
  if (!(u_bar_t >= 0.0)) { throw std::invalid_argument("assemble_ocp: budget must be nonnegative"); }
  if (scenario.horizon_l < 1) { throw std::invalid_argument("assemble_ocp: horizon must be at least 1"); }

  OcpInstance inst;
  inst.scenario = scenario;
  inst.ensemble = build_ensemble(scenario);
  inst.weights = effective_weights(scenario, active_weights);
  inst.u_bar_t = u_bar_t;
  inst.formulation = options.equality_formulation;
  const auto & ens = inst.ensemble;
  const auto & ew = inst.weights;
  if (x_t.size() != ens.nx()) {
    throw std::invalid_argument("assemble_ocp: state has size " + std::to_string(x_t.size()) + ", expected "
      + std::to_string(ens.nx()));
  }
  inst.x_t = x_t;

  const bool zero_budget = u_bar_t <= kZeroBudget;
  const int big_n = ens.num_systems;
  const int n = ens.n;
  const int m = ens.m;
  const int l = scenario.horizon_l;

  // DC penalty list: stage weight rho^i, terminal weight beta rho^i
  const double target = u_bar_t / big_n;
  for (int k = 0; k <= l; ++k) {
    for (int i = 0; i < big_n; ++i) {
      const double w = (k < l ? 1.0 : ew.beta) * ew.rho[i];
      if (w > 0.0) { inst.dc_penalties.push_back({i, k, w, target}); }
    }
  }
  const bool hinge = options.equality_formulation == EqualityFormulation::ConvexHinge && !inst.dc_penalties.empty();

  auto & ly = inst.layout;
  ly.horizon = l;
  ly.num_systems = big_n;
  ly.n = n;
  ly.m = m;
  ly.has_budget_states = options.budget_in_horizon && !zero_budget;
  ly.has_hinge = hinge;
  ly.states_begin = 0;
  ly.inputs_begin = ly.states_begin + ly.num_state_vars();
  ly.u_plus_begin = ly.inputs_begin + ly.num_input_vars();
  ly.u_minus_begin = ly.u_plus_begin + ly.num_input_vars();
  ly.term_x_plus_begin = ly.u_minus_begin + ly.num_input_vars();
  ly.term_x_minus_begin = ly.term_x_plus_begin + ly.nx();
  ly.term_u_plus_begin = ly.term_x_minus_begin + ly.nx();
  ly.term_u_minus_begin = ly.term_u_plus_begin + ly.nu();
  ly.eps_x_index = ly.term_u_minus_begin + ly.nu();
  ly.eps_u_index = ly.eps_x_index + 1;
  ly.budget_begin = ly.eps_u_index + 1;
  ly.hinge_begin = ly.budget_begin + ly.num_budget_vars();
  ly.size = ly.hinge_begin + ly.num_hinge_vars();
  const int nv = ly.size;
  const int nx = ly.nx();
  const int nu = ly.nu();

  // ---- cost ----
  std::vector<Triplet> pt;
  Vector q = Vector::Zero(nv);
  double constant = 0.0;
  const Matrix & qt = ew.q_tilde;
  const Vector qt_xs = qt * ens.x_s;
  const double xs_qt_xs = ens.x_s.dot(qt_xs);
  for (int k = 0; k <= l; ++k) {
    const double scale = k < l ? 1.0 : ew.beta;
    if (scale == 0.0) { continue; }
    const int base = ly.state(k);
    for (int r = 0; r < nx; ++r) {
      for (int c = 0; c < nx; ++c) {
        if (qt(r, c) != 0.0) { pt.emplace_back(base + r, base + c, 2.0 * scale * qt(r, c)); }
      }
    }
    q.segment(base, nx) -= 2.0 * scale * qt_xs;
    constant += scale * xs_qt_xs;
  }
  for (const auto & p : inst.dc_penalties) {
    if (hinge) {
      const int h = ly.hinge(p.stage, p.system);
      pt.emplace_back(h, h, 2.0 * p.weight);
      continue;
    }
    // w s^2 with s = 1'(u+ + u-) of this system and stage; w c^2 constant
    std::vector<int> idx;
    for (int j = 0; j < m; ++j) {
      idx.push_back(ly.u_plus(p.stage) + p.system * m + j);
      idx.push_back(ly.u_minus(p.stage) + p.system * m + j);
    }
    for (int r : idx) {
      for (int c : idx) { pt.emplace_back(r, c, 2.0 * p.weight); }
    }
    constant += p.weight * p.target * p.target;
  }
  pt.emplace_back(ly.eps_x_index, ly.eps_x_index, 2.0 * ew.lambda_x);
  pt.emplace_back(ly.eps_u_index, ly.eps_u_index, 2.0 * ew.lambda_u);

  inst.qp.p.resize(nv, nv);
  inst.qp.p.setFromTriplets(pt.begin(), pt.end());
  inst.qp.q = q;
  inst.qp.constant = constant;

  // ---- equalities ----
  RowBuilder eq(nv);
  eq.begin_block("initial_condition");
  for (int r = 0; r < nx; ++r) { eq.add(eq.add_row(x_t(r)), ly.state(0) + r, 1.0); }
  eq.end_block();

  eq.begin_block("dynamics");
  for (int k = 0; k < l; ++k) {
    for (int r = 0; r < nx; ++r) {
      const int row = eq.add_row(0.0);
      eq.add(row, ly.state(k + 1) + r, 1.0);
      for (int c = 0; c < nx; ++c) { eq.add(row, ly.state(k) + c, -ens.a(r, c)); }
      for (int c = 0; c < nu; ++c) { eq.add(row, ly.input(k) + c, -ens.b(r, c)); }
    }
  }
  eq.end_block();

  eq.begin_block("terminal_equilibrium");
  for (int r = 0; r < nx; ++r) {
    const int row = eq.add_row(0.0);
    for (int c = 0; c < nx; ++c) { eq.add(row, ly.state(l) + c, ens.a(r, c) - (r == c ? 1.0 : 0.0)); }
    for (int c = 0; c < nu; ++c) { eq.add(row, ly.input(l) + c, ens.b(r, c)); }
  }
  eq.end_block();

  eq.begin_block("input_split");
  for (int k = 0; k <= l; ++k) {
    for (int r = 0; r < nu; ++r) {
      const int row = eq.add_row(0.0);
      eq.add(row, ly.input(k) + r, 1.0);
      eq.add(row, ly.u_plus(k) + r, -1.0);
      eq.add(row, ly.u_minus(k) + r, 1.0);
    }
  }
  eq.end_block();

  eq.begin_block("terminal_state_split");
  for (int r = 0; r < nx; ++r) {
    const int row = eq.add_row(ens.x_s(r));
    eq.add(row, ly.state(l) + r, 1.0);
    eq.add(row, ly.term_x_plus_begin + r, -1.0);
    eq.add(row, ly.term_x_minus_begin + r, 1.0);
  }
  eq.end_block();

  eq.begin_block("terminal_input_split");
  for (int r = 0; r < nu; ++r) {
    const int row = eq.add_row(ens.u_s(r));
    eq.add(row, ly.input(l) + r, 1.0);
    eq.add(row, ly.term_u_plus_begin + r, -1.0);
    eq.add(row, ly.term_u_minus_begin + r, 1.0);
  }
  eq.end_block();

  if (ly.has_budget_states) {
    eq.begin_block("budget_initial");
    eq.add(eq.add_row(u_bar_t), ly.budget(0), 1.0);
    eq.end_block();
    eq.begin_block("budget_dynamics");
    for (int k = 0; k < l; ++k) {
      const int row = eq.add_row(0.0);
      eq.add(row, ly.budget(k + 1), 1.0);
      eq.add(row, ly.budget(k), -1.0);
      for (int r = 0; r < nu; ++r) {
        eq.add(row, ly.u_plus(k) + r, 1.0);
        eq.add(row, ly.u_minus(k) + r, 1.0);
      }
    }
    eq.end_block();
  }

  if (zero_budget) {
    // no resources: pin the splits instead of asking for an empty-interior allocation
    eq.begin_block("zero_input");
    for (int k = 0; k <= l; ++k) {
      for (int r = 0; r < nu; ++r) {
        eq.add(eq.add_row(0.0), ly.u_plus(k) + r, 1.0);
        eq.add(eq.add_row(0.0), ly.u_minus(k) + r, 1.0);
      }
    }
    eq.end_block();
  }

  // ---- inequalities ----
  RowBuilder in(nv);
  in.begin_block("input_set");
  for (int k = 0; k <= l; ++k) {
    for (int i = 0; i < big_n; ++i) {
      const auto & set = scenario.input_sets.empty() ? PolytopeSet::unconstrained(m) : scenario.input_sets[i];
      for (int r = 0; r < set.rows(); ++r) {
        const int row = in.add_row(set.h_vector(r));
        for (int c = 0; c < m; ++c) { in.add(row, ly.input(k) + i * m + c, set.h_matrix(r, c)); }
      }
    }
  }
  in.end_block();

  in.begin_block("state_set");
  for (int k = 0; k <= l; ++k) {
    for (int i = 0; i < big_n; ++i) {
      const auto & set = scenario.state_sets.empty() ? PolytopeSet::unconstrained(n) : scenario.state_sets[i];
      for (int r = 0; r < set.rows(); ++r) {
        const int row = in.add_row(set.h_vector(r));
        for (int c = 0; c < n; ++c) { in.add(row, ly.state(k) + i * n + c, set.h_matrix(r, c)); }
      }
    }
  }
  in.end_block();

  if (!zero_budget) {
    in.begin_block("allocation");
    for (int k = 0; k <= l; ++k) {
      const int row = in.add_row(ly.has_budget_states ? 0.0 : u_bar_t);
      for (int r = 0; r < nu; ++r) {
        in.add(row, ly.u_plus(k) + r, 1.0);
        in.add(row, ly.u_minus(k) + r, 1.0);
      }
      if (ly.has_budget_states) { in.add(row, ly.budget(k), -1.0); }
    }
    in.end_block();
  }

  in.begin_block("terminal_state_bound");
  {
    const int row = in.add_row(0.0);
    for (int r = 0; r < nx; ++r) {
      in.add(row, ly.term_x_plus_begin + r, 1.0);
      in.add(row, ly.term_x_minus_begin + r, 1.0);
    }
    in.add(row, ly.eps_x_index, -1.0);
  }
  in.end_block();

  in.begin_block("terminal_input_bound");
  {
    const int row = in.add_row(0.0);
    for (int r = 0; r < nu; ++r) {
      in.add(row, ly.term_u_plus_begin + r, 1.0);
      in.add(row, ly.term_u_minus_begin + r, 1.0);
    }
    in.add(row, ly.eps_u_index, -1.0);
  }
  in.end_block();

  in.begin_block("split_nonnegativity");
  if (!zero_budget) {
    for (int k = 0; k <= l; ++k) {
      for (int r = 0; r < nu; ++r) {
        in.add(in.add_row(0.0), ly.u_plus(k) + r, -1.0);
        in.add(in.add_row(0.0), ly.u_minus(k) + r, -1.0);
      }
    }
  }
  for (int r = 0; r < nx; ++r) {
    in.add(in.add_row(0.0), ly.term_x_plus_begin + r, -1.0);
    in.add(in.add_row(0.0), ly.term_x_minus_begin + r, -1.0);
  }
  for (int r = 0; r < nu; ++r) {
    in.add(in.add_row(0.0), ly.term_u_plus_begin + r, -1.0);
    in.add(in.add_row(0.0), ly.term_u_minus_begin + r, -1.0);
  }
  in.end_block();

  in.begin_block("slack_nonnegativity");
  in.add(in.add_row(0.0), ly.eps_x_index, -1.0);
  in.add(in.add_row(0.0), ly.eps_u_index, -1.0);
  in.end_block();

  if (ly.has_budget_states) {
    in.begin_block("budget_nonnegativity");
    for (int k = 0; k <= l; ++k) { in.add(in.add_row(0.0), ly.budget(k), -1.0); }
    in.end_block();
  }

  if (hinge) {
    // h >= s - c and h >= 0, cost w h^2
    in.begin_block("hinge");
    for (const auto & p : inst.dc_penalties) {
      const int h = ly.hinge(p.stage, p.system);
      const int row = in.add_row(p.target);
      for (int j = 0; j < m; ++j) {
        in.add(row, ly.u_plus(p.stage) + p.system * m + j, 1.0);
        in.add(row, ly.u_minus(p.stage) + p.system * m + j, 1.0);
      }
      in.add(row, h, -1.0);
      in.add(in.add_row(0.0), h, -1.0);
    }
    in.end_block();
  }

  inst.qp.a_eq = eq.matrix();
  inst.qp.b_eq = eq.rhs();
  inst.qp.g_ineq = in.matrix();
  inst.qp.h_ineq = in.rhs();
  inst.equality_blocks = eq.blocks();
  inst.inequality_blocks = in.blocks();
  return inst;
}

}  // namespace fairmpc
