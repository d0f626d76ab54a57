#include "fairmpc/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace fairmpc {

namespace {

Vector stacked_targets(const Scenario & sc)
{
  const int n = sc.state_dim();
  Vector x_s(n * sc.num_systems());
  for (int i = 0; i < sc.num_systems(); ++i) { x_s.segment(i * n, n) = sc.targets[i].x_s; }
  return x_s;
}

std::vector<Vector> target_inputs(const Scenario & sc)
{
  std::vector<Vector> u_s;
  for (const auto & t : sc.targets) { u_s.push_back(t.u_s); }
  return u_s;
}

Vector stack(const std::vector<Vector> & parts)
{
  Eigen::Index size = 0;
  for (const auto & p : parts) { size += p.size(); }
  Vector out(size);
  Eigen::Index at = 0;
  for (const auto & p : parts) {
    out.segment(at, p.size()) = p;
    at += p.size();
  }
  return out;
}

double relative_gap(double a, double b)
{
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / scale;
}

bool premise_holds(const Scenario & sc, double u_bar_t)
{
  const int m = sc.input_dim();
  const double share = u_bar_t / (m * sc.num_systems());
  for (const auto & t : sc.targets) {
    if ((t.u_s.array() - share).abs().maxCoeff() > 1e-9 * std::max(1.0, u_bar_t)) { return false; }
  }
  return true;
}

/// Dense helper for 0.5 z'Pz + q'z + c with quadratic terms added as (Hz + g)' S (Hz + g).
struct DenseQp
{
  Matrix p;
  Vector q;
  double c = 0.0;
  std::vector<Triplet> a_eq;
  std::vector<double> b_eq;
  std::vector<Triplet> g_in;
  std::vector<double> h_in;

  explicit DenseQp(int size) : p(Matrix::Zero(size, size)), q(Vector::Zero(size)) {}

  void add_square(const Matrix & h, const Vector & g, const Matrix & s)
  {
    const Matrix sh = s * h;
    p.noalias() += 2.0 * h.transpose() * sh;
    q.noalias() += 2.0 * h.transpose() * (s * g);
    c += g.dot(s * g);
  }

  void add_row(std::vector<Triplet> & out, int row, const Eigen::RowVectorXd & coeffs)
  {
    for (Eigen::Index j = 0; j < coeffs.size(); ++j) {
      if (coeffs(j) != 0.0) { out.emplace_back(row, static_cast<int>(j), coeffs(j)); }
    }
  }

  void equality(const Eigen::RowVectorXd & coeffs, double rhs)
  {
    add_row(a_eq, static_cast<int>(b_eq.size()), coeffs);
    b_eq.push_back(rhs);
  }

  void inequality(const Eigen::RowVectorXd & coeffs, double rhs)
  {
    add_row(g_in, static_cast<int>(h_in.size()), coeffs);
    h_in.push_back(rhs);
  }

  [[nodiscard]] QpProblem build() const
  {
    const auto size = static_cast<int>(q.size());
    QpProblem qp;
    qp.p = p.sparseView();
    qp.q = q;
    qp.constant = c;
    qp.a_eq.resize(static_cast<int>(b_eq.size()), size);
    qp.a_eq.setFromTriplets(a_eq.begin(), a_eq.end());
    qp.b_eq = Eigen::Map<const Vector>(b_eq.data(), static_cast<Eigen::Index>(b_eq.size()));
    qp.g_ineq.resize(static_cast<int>(h_in.size()), size);
    qp.g_ineq.setFromTriplets(g_in.begin(), g_in.end());
    qp.h_ineq = Eigen::Map<const Vector>(h_in.data(), static_cast<Eigen::Index>(h_in.size()));
    return qp;
  }
};

}  // namespace

BoundReport make_bound(double left_hand, double right_hand)
{
  BoundReport r;
  r.left_hand = left_hand;
  r.right_hand = right_hand;
  r.margin = right_hand - left_hand;
  r.satisfied = left_hand <= right_hand + 1e-9 * std::max(1.0, std::abs(right_hand));
  return r;
}

IdentityReport verify_lemma1(const std::vector<Vector> & states, const Vector & x_s,
  const std::vector<Matrix> & q_weights, const std::vector<Matrix> & w_weights)
{
  const int big_n = static_cast<int>(q_weights.size());
  if (big_n == 0 || static_cast<int>(w_weights.size()) != big_n || x_s.size() % big_n != 0) {
    throw std::invalid_argument("verify_lemma1: need one Q and one W per system and a matching target");
  }
  const auto n = static_cast<int>(x_s.size() / big_n);
  const Matrix q_tilde = build_qtilde(q_weights, w_weights, build_equity_matrices(n, big_n));

  IdentityReport r;
  for (const auto & x : states) {
    if (x.size() != x_s.size()) { throw std::invalid_argument("verify_lemma1: state size mismatch"); }
    const Vector e = x - x_s;
    Vector mean = Vector::Zero(n);
    for (int i = 0; i < big_n; ++i) { mean += e.segment(i * n, n); }
    mean /= big_n;
    for (int i = 0; i < big_n; ++i) {
      const Vector ei = e.segment(i * n, n);
      const Vector dev = ei - mean;
      r.direct += ei.dot(q_weights[i] * ei) + dev.dot(w_weights[i] * dev);
    }
    r.quadratic += e.dot(q_tilde * e);
  }
  r.relative_error = r.direct == r.quadratic ? 0.0 : relative_gap(r.direct, r.quadratic);
  r.satisfied = r.relative_error <= 1e-9;
  return r;
}

double delta_term(const std::vector<Vector> & u_s, double u_bar_t, const std::vector<double> & rho, int m, int horizon)
{
  if (u_s.size() != rho.size()) { throw std::invalid_argument("delta_term: u_s and rho need one entry per system"); }
  const auto big_n = static_cast<double>(rho.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    acc += rho[i] * (u_s[i].array() - u_bar_t / (m * big_n)).matrix().squaredNorm();
  }
  return m * horizon * acc;
}

double fair_stage_cost(
  const Vector & x, const Vector & u, const Vector & x_s, const EffectiveWeights & weights, int m, double u_bar_t)
{
  const Vector dx = x - x_s;
  const auto big_n = static_cast<int>(weights.rho.size());
  double acc = dx.dot(weights.q_tilde * dx);
  for (int i = 0; i < big_n; ++i) {
    const double d = u.segment(i * m, m).lpNorm<1>() - u_bar_t / big_n;
    acc += weights.rho[i] * d * d;
  }
  return acc;
}

double mpc_stage_cost(
  const Vector & x, const Vector & u, const Vector & x_s, const Vector & u_s, const EffectiveWeights & weights, int m)
{
  const Vector dx = x - x_s;
  double acc = dx.dot(weights.q_tilde * dx);
  for (std::size_t i = 0; i < weights.rho.size(); ++i) {
    const auto at = static_cast<Eigen::Index>(i) * m;
    acc += m * weights.rho[i] * (u.segment(at, m) - u_s.segment(at, m)).squaredNorm();
  }
  return acc;
}

BoundReport verify_lemma2(
  const Trajectories & traj, const Scenario & scenario, const EffectiveWeights & weights, double u_bar_t)
{
  const int l = scenario.horizon_l;
  const int m = scenario.input_dim();
  if (static_cast<int>(traj.states.size()) < l || static_cast<int>(traj.inputs.size()) < l) {
    throw std::invalid_argument("verify_lemma2: trajectory shorter than the horizon");
  }
  const Vector x_s = stacked_targets(scenario);
  const auto u_s_list = target_inputs(scenario);
  const Vector u_s = stack(u_s_list);
  double fair = 0.0;
  double mpc = 0.0;
  for (int k = 0; k < l; ++k) {
    fair += fair_stage_cost(traj.states[k], traj.inputs[k], x_s, weights, m, u_bar_t);
    mpc += mpc_stage_cost(traj.states[k], traj.inputs[k], x_s, u_s, weights, m);
  }
  return make_bound(fair, mpc + delta_term(u_s_list, u_bar_t, weights.rho, m, l));
}

StageBoundReport verify_stage_bound(
  const Vector & x_l, const Vector & u_l, const Scenario & scenario, const EffectiveWeights & weights, double u_bar_t)
{
  const int m = scenario.input_dim();
  const double big_n = scenario.num_systems();
  const Vector x_s = stacked_targets(scenario);
  const Vector u_s = stack(target_inputs(scenario));
  const double fair = fair_stage_cost(x_l, u_l, x_s, weights, m, u_bar_t);
  const double mpc = mpc_stage_cost(x_l, u_l, x_s, u_s, weights, m);
  double rho_sum = 0.0;
  for (double r : weights.rho) { rho_sum += r; }
  const double base = rho_sum * u_bar_t * u_bar_t / (big_n * big_n);
  StageBoundReport r;
  r.proof_constant = make_bound(fair, mpc + (big_n * big_n + 1.0) * base);
  r.statement_constant = make_bound(fair, mpc + (big_n * big_n - 1.0) * base);
  return r;
}

double lbar_candidate(const std::vector<double> & rho, double u_bar_t, double epsilon)
{
  if (rho.empty()) { throw std::invalid_argument("lbar_candidate: empty rho"); }
  const double big_n = static_cast<double>(rho.size());
  double rho_sum = 0.0;
  for (double r : rho) { rho_sum += r; }
  return (big_n * big_n + 1.0) / (big_n * big_n) * rho_sum * u_bar_t * u_bar_t + epsilon;
}

double lbar_candidate(const Scenario & scenario, double u_bar_t, double epsilon)
{
  return lbar_candidate(expand_class_weights(scenario).rho, u_bar_t, epsilon);
}

double lbar_candidate_unfeasible(
  const std::vector<double> & rho, const std::vector<Vector> & u_s, double u_bar_t, double epsilon)
{
  if (rho.size() != u_s.size() || rho.empty()) {
    throw std::invalid_argument("lbar_candidate_unfeasible: rho and u_s need one entry per system");
  }
  const double big_n = static_cast<double>(rho.size());
  double acc = epsilon;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    const double norm = u_s[i].lpNorm<1>();
    acc += rho[i] * (norm * norm + u_bar_t * u_bar_t / (big_n * big_n));
  }
  return acc;
}

double lbar_candidate_unfeasible(const Scenario & scenario, double u_bar_t, double epsilon)
{
  return lbar_candidate_unfeasible(expand_class_weights(scenario).rho, target_inputs(scenario), u_bar_t, epsilon);
}

ReferenceMpcResult solve_reference_mpc(
  const Scenario & scenario, const Vector & x_t, double u_bar_t, const WeightSet & weights)
{
  const auto ens = build_ensemble(scenario);
  const auto eff = effective_weights(scenario, weights);
  const int big_n = ens.num_systems;
  const int n = ens.n;
  const int m = ens.m;
  const int nx = ens.nx();
  const int nu = ens.nu();
  const int l = scenario.horizon_l;
  if (x_t.size() != nx) { throw std::invalid_argument("solve_reference_mpc: x_t has the wrong size"); }

  const int u_begin = 0;
  const int p_begin = u_begin + (l + 1) * nu;
  const int m_begin = p_begin + (l + 1) * nu;
  const int dxp = m_begin + (l + 1) * nu;
  const int dxm = dxp + nx;
  const int dup = dxm + nx;
  const int dum = dup + nu;
  const int ex = dum + nu;
  const int eu = ex + 1;
  const int size = eu + 1;

  // x_k = phi[k] x_t + gam[k] z, with gam[k] acting on the input block of z
  std::vector<Matrix> phi(l + 1);
  std::vector<Matrix> gam(l + 1, Matrix::Zero(nx, size));
  phi[0] = Matrix::Identity(nx, nx);
  for (int k = 0; k < l; ++k) {
    phi[k + 1] = ens.a * phi[k];
    gam[k + 1] = ens.a * gam[k];
    gam[k + 1].block(0, u_begin + k * nu, nx, nu) += ens.b;
  }
  auto select = [&](int begin, int rows) {
    Matrix s = Matrix::Zero(rows, size);
    s.block(0, begin, rows, rows).setIdentity();
    return s;
  };

  Matrix r = Matrix::Zero(nu, nu);
  for (int i = 0; i < big_n; ++i) { r.block(i * m, i * m, m, m) = m * eff.rho[i] * Matrix::Identity(m, m); }

  DenseQp qp(size);
  for (int k = 0; k <= l; ++k) {
    const double scale = k < l ? 1.0 : eff.beta;
    qp.add_square(gam[k], phi[k] * x_t - ens.x_s, scale * eff.q_tilde);
    qp.add_square(select(u_begin + k * nu, nu), -ens.u_s, scale * r);
  }
  qp.add_square(select(ex, 1), Vector::Zero(1), Matrix::Constant(1, 1, eff.lambda_x));
  qp.add_square(select(eu, 1), Vector::Zero(1), Matrix::Constant(1, 1, eff.lambda_u));

  auto unit = [&](int j, double v) {
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(size);
    row(j) = v;
    return row;
  };

  for (int k = 0; k <= l; ++k) {
    for (int j = 0; j < nu; ++j) {
      Eigen::RowVectorXd row = unit(u_begin + k * nu + j, 1.0);
      row(p_begin + k * nu + j) = -1.0;
      row(m_begin + k * nu + j) = 1.0;
      qp.equality(row, 0.0);
    }
  }
  const Matrix eq_term = (ens.a - Matrix::Identity(nx, nx)) * gam[l] + ens.b * select(u_begin + l * nu, nu);
  const Vector eq_rhs = -(ens.a - Matrix::Identity(nx, nx)) * phi[l] * x_t;
  for (int j = 0; j < nx; ++j) { qp.equality(eq_term.row(j), eq_rhs(j)); }
  for (int j = 0; j < nx; ++j) {
    Eigen::RowVectorXd row = gam[l].row(j);
    row(dxp + j) -= 1.0;
    row(dxm + j) += 1.0;
    qp.equality(row, ens.x_s(j) - phi[l].row(j).dot(x_t));
  }
  for (int j = 0; j < nu; ++j) {
    Eigen::RowVectorXd row = unit(u_begin + l * nu + j, 1.0);
    row(dup + j) = -1.0;
    row(dum + j) = 1.0;
    qp.equality(row, ens.u_s(j));
  }

  for (int j = p_begin; j < ex; ++j) { qp.inequality(unit(j, -1.0), 0.0); }
  qp.inequality(unit(ex, -1.0), 0.0);
  qp.inequality(unit(eu, -1.0), 0.0);
  for (int k = 0; k <= l; ++k) {
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(size);
    row.segment(p_begin + k * nu, nu).setOnes();
    row.segment(m_begin + k * nu, nu).setOnes();
    qp.inequality(row, u_bar_t);
  }
  {
    Eigen::RowVectorXd row = unit(ex, -1.0);
    row.segment(dxp, nx).setOnes();
    row.segment(dxm, nx).setOnes();
    qp.inequality(row, 0.0);
    Eigen::RowVectorXd row_u = unit(eu, -1.0);
    row_u.segment(dup, nu).setOnes();
    row_u.segment(dum, nu).setOnes();
    qp.inequality(row_u, 0.0);
  }
  for (int i = 0; i < big_n; ++i) {
    const auto & us = scenario.input_sets[i];
    const auto & xs = scenario.state_sets[i];
    for (int k = 0; k <= l; ++k) {
      for (int row = 0; row < us.rows(); ++row) {
        Eigen::RowVectorXd coeffs = Eigen::RowVectorXd::Zero(size);
        coeffs.segment(u_begin + k * nu + i * m, m) = us.h_matrix.row(row);
        qp.inequality(coeffs, us.h_vector(row));
      }
      if (k == 0) { continue; }
      for (int row = 0; row < xs.rows(); ++row) {
        const Eigen::RowVectorXd h = xs.h_matrix.row(row);
        qp.inequality(h * gam[k].middleRows(i * n, n), xs.h_vector(row) - h.dot(phi[k].middleRows(i * n, n) * x_t));
      }
    }
  }

  const auto problem = qp.build();
  const auto res = solve_qp(problem);
  ReferenceMpcResult out;
  out.status = res.status;
  if (res.status != QpStatus::Solved) { return out; }
  out.objective = problem.objective(res.z);
  for (int k = 0; k <= l; ++k) {
    out.trajectories.states.push_back(phi[k] * x_t + gam[k] * res.z);
    out.trajectories.inputs.push_back(res.z.segment(u_begin + k * nu, nu));
  }
  out.trajectories.eps_x = res.z(ex);
  out.trajectories.eps_u = res.z(eu);
  return out;
}

EquivalenceReport verify_corollary(const Scenario & scenario, const CcpSettings & settings, std::optional<double> u_bar_t)
{
  const double u_bar = u_bar_t.value_or(scenario.budget.u_bar_0);
  const int n = scenario.state_dim();
  Vector x0(n * scenario.num_systems());
  for (int i = 0; i < scenario.num_systems(); ++i) { x0.segment(i * n, n) = scenario.initial_states[i]; }

  EquivalenceReport r;
  r.premise_holds = premise_holds(scenario, u_bar);
  const auto inst = assemble_ocp(scenario, x0, u_bar, scenario.weights);
  const auto fair = solve_fair_mpc(inst, settings);
  const auto mpc = solve_reference_mpc(scenario, x0, u_bar, scenario.weights);
  r.fair_status = fair.status;
  r.mpc_status = mpc.status;
  if (fair.status == SolveStatus::Infeasible || mpc.status != QpStatus::Solved) {
    r.relative_difference = std::numeric_limits<double>::infinity();
    return r;
  }
  r.fair_objective = fair.cost.total;
  r.mpc_objective = mpc.objective;
  r.relative_difference = std::abs(r.fair_objective - r.mpc_objective) / std::max(1.0, std::abs(r.mpc_objective));
  r.agrees = r.relative_difference <= 1e-5;
  return r;
}

Trajectories random_feasible_trajectory(const Scenario & scenario, double u_bar_t, std::uint64_t seed)
{
  const auto ens = build_ensemble(scenario);
  const int m = ens.m;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  Vector x(ens.nx());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    x(j) = ens.x_s(j) + (2.0 * unit(rng) - 1.0) * 5.0 * (1.0 + std::abs(ens.x_s(j)));
  }
  Trajectories traj;
  for (int k = 0; k <= scenario.horizon_l; ++k) {
    Vector u(ens.nu());
    for (Eigen::Index j = 0; j < u.size(); ++j) { u(j) = gauss(rng); }
    // corners of the budget set are where the bounds are tightest
    const double pick = unit(rng);
    if (pick < 0.2) {
      const auto idle = static_cast<int>(unit(rng) * ens.num_systems) % ens.num_systems;
      u.segment(idle * m, m).setZero();
    }
    const double total = pick > 0.8 ? u_bar_t : unit(rng) * u_bar_t;
    const double norm = u.lpNorm<1>();
    if (norm > 0.0) { u *= total / norm; }
    traj.states.push_back(x);
    traj.inputs.push_back(u);
    x = plant_step(ens, x, u);
  }
  traj.eps_x = (traj.states.back() - ens.x_s).lpNorm<1>();
  traj.eps_u = (traj.inputs.back() - ens.u_s).lpNorm<1>();
  return traj;
}

bool VerificationReport::passed() const
{
  const bool base = lemma1.violations == 0 && lemma2.violations == 0 && stage_bound_proof.violations == 0;
  return base && (!corollary || corollary->agrees);
}

VerificationReport run_verification(const Scenario & scenario, int draws, std::uint64_t seed)
{
  if (draws < 0) { throw std::invalid_argument("run_verification: draws must be nonnegative"); }
  const auto eff = effective_weights(scenario, scenario.weights);
  const double u_bar = scenario.budget.u_bar_0;
  const Vector x_s = stacked_targets(scenario);
  const int l = scenario.horizon_l;

  VerificationReport rep;
  rep.scenario = scenario.name;
  rep.lemma2.worst = rep.stage_bound_proof.worst = rep.stage_bound_statement.worst =
    std::numeric_limits<double>::infinity();
  auto tally = [](SuiteSummary & s, const BoundReport & b) {
    ++s.draws;
    if (!b.satisfied) { ++s.violations; }
    s.worst = std::min(s.worst, b.margin);
  };

  std::mt19937_64 seeds(seed);
  for (int d = 0; d < draws; ++d) {
    const auto traj = random_feasible_trajectory(scenario, u_bar, seeds());
    const std::vector<Vector> running(traj.states.begin(), traj.states.begin() + l);
    const auto id = verify_lemma1(running, x_s, eff.q, eff.w);
    ++rep.lemma1.draws;
    if (!id.satisfied) { ++rep.lemma1.violations; }
    rep.lemma1.worst = std::max(rep.lemma1.worst, id.relative_error);

    tally(rep.lemma2, verify_lemma2(traj, scenario, eff, u_bar));
    const auto stage = verify_stage_bound(traj.states[l], traj.inputs[l], scenario, eff, u_bar);
    tally(rep.stage_bound_proof, stage.proof_constant);
    tally(rep.stage_bound_statement, stage.statement_constant);
  }
  if (draws == 0) { rep.lemma2.worst = rep.stage_bound_proof.worst = rep.stage_bound_statement.worst = 0.0; }
  if (draws > 0 && premise_holds(scenario, u_bar)) { rep.corollary = verify_corollary(scenario); }
  return rep;
}

}  // namespace fairmpc
