#include "fairmpc/presets.hpp"

#include <stdexcept>

namespace fairmpc {

namespace {

Vector vec(std::initializer_list<double> v)
{
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) { out(i++) = x; }
  return out;
}

/// Fills targets, sets and uniform weights once the systems are in place.
void finish(Scenario & sc, const std::vector<Vector> & x_s, double q, double rho_bar, double w_bar, double gamma_u,
  double gamma_e)
{
  const int big_n = sc.num_systems();
  const int n = sc.state_dim();
  const int m = sc.input_dim();
  sc.targets.clear();
  for (int i = 0; i < big_n; ++i) {
    const auto eq = compute_equilibrium_input(sc.systems[i], x_s[i]);
    if (!eq.u_s) { throw std::logic_error("preset target is not an equilibrium"); }
    sc.targets.push_back({x_s[i], *eq.u_s});
    sc.input_sets.push_back(PolytopeSet::unconstrained(m));
    sc.state_sets.push_back(PolytopeSet::unconstrained(n));
    sc.weights.q_weights.push_back(q * Matrix::Identity(n, n));
  }
  const int groups = sc.num_weight_groups();
  sc.weights.rho_bar.assign(static_cast<std::size_t>(groups), rho_bar);
  sc.weights.w_bar.assign(static_cast<std::size_t>(groups), w_bar * Matrix::Identity(n, n));
  sc.weights.gamma_u = gamma_u;
  sc.weights.gamma_e = gamma_e * Matrix::Identity(n, n);
  sc.weights.beta = 0.1;
  sc.weights.lambda_x = 0.1;
  sc.weights.lambda_u = 0.1;
}

Scenario two_system(double u_bar)
{
  Scenario sc;
  sc.name = u_bar > 10.0 ? "two-system-ample" : "two-system";
  for (double a : {0.4, 0.9}) { sc.systems.push_back({Matrix::Constant(1, 1, a), Matrix::Constant(1, 1, 0.1), ""}); }
  sc.budget = {BudgetMode::ConstantPerStep, u_bar};
  sc.horizon_l = 20;
  sc.sim_steps_t = 20;
  sc.initial_states = {vec({0.0}), vec({0.0})};
  finish(sc, {vec({2.0}), vec({2.0})}, 1.0, 3.0, 1.0, 0.1, 10.0);
  return sc;
}

Scenario two_system_unstable()
{
  Scenario sc;
  sc.name = "two-system-unstable";
  for (double a : {0.5, 1.5}) { sc.systems.push_back({Matrix::Constant(1, 1, a), Matrix::Constant(1, 1, 0.1), ""}); }
  sc.budget = {BudgetMode::ConstantPerStep, 10.0};
  sc.horizon_l = 20;
  sc.sim_steps_t = 20;
  // an initial state of 2 or more cannot be steered back with this budget
  sc.initial_states = {vec({1.0}), vec({1.0})};
  finish(sc, {vec({0.0}), vec({0.0})}, 1.0, 1.0, 1.0, 1e-2, 1.0);
  return sc;
}

Scenario motion(const std::string & name, const std::vector<std::pair<double, double>> & b,
  const std::vector<std::pair<double, double>> & p_s, BudgetPolicy budget)
{
  Scenario sc;
  sc.name = name;
  std::vector<Vector> x_s;
  for (std::size_t i = 0; i < b.size(); ++i) {
    sc.systems.push_back(motion_system(b[i].first, b[i].second));
    sc.initial_states.push_back(Vector::Zero(4));
    x_s.push_back(vec({p_s[i].first, p_s[i].second, 0.0, 0.0}));
  }
  sc.budget = budget;
  sc.horizon_l = 10;
  sc.sim_steps_t = 20;
  if (b.size() == 8) { sc.classes = std::vector<std::vector<int>>{{0, 1, 2, 3}, {4, 5, 6, 7}}; }
  finish(sc, x_s, 1.0, 1.0, 1.0, 0.1, 10.0);
  return sc;
}

const std::vector<std::pair<double, double>> kMotionPairB = {{0.2, 0.2}, {1.0, 1.0}};
const std::vector<std::pair<double, double>> kMotionPairP = {{10.0, -13.0}, {-7.0, 2.0}};

}  // namespace

LtiSystem motion_system(double b1, double b2)
{
  LtiSystem s;
  s.a_matrix = Matrix::Identity(4, 4);
  s.a_matrix(0, 2) = 1.0;
  s.a_matrix(1, 3) = 1.0;
  s.b_matrix = Matrix::Zero(4, 2);
  s.b_matrix(2, 0) = b1;
  s.b_matrix(3, 1) = b2;
  return s;
}

Scenario make_scalar_ensemble(const std::vector<double> & a, const std::vector<double> & b,
  const std::vector<double> & x0, const std::vector<double> & xs, double u_bar)
{
  if (a.size() != b.size() || a.size() != x0.size() || a.size() != xs.size() || a.empty()) {
    throw std::invalid_argument("make_scalar_ensemble: a, b, x0 and xs need the same nonzero length");
  }
  Scenario sc;
  sc.name = "scalar-ensemble";
  std::vector<Vector> targets;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sc.systems.push_back({Matrix::Constant(1, 1, a[i]), Matrix::Constant(1, 1, b[i]), ""});
    sc.initial_states.push_back(vec({x0[i]}));
    targets.push_back(vec({xs[i]}));
  }
  sc.budget = {BudgetMode::ConstantPerStep, u_bar};
  sc.horizon_l = 10;
  sc.sim_steps_t = 10;
  finish(sc, targets, 1.0, 3.0, 1.0, 0.1, 10.0);
  return sc;
}

std::vector<PresetInfo> list_presets()
{
  return {
    {"two-system", "two scalar stable plants, shared budget 10, target 2"},
    {"two-system-ample", "same plants with budget 20, used for auto-tuning"},
    {"two-system-unstable", "scalar pair with one open-loop unstable plant, regulated to the origin"},
    {"motion-two-system", "planar double integrators, refrained vs influenced, budget 20 per step"},
    {"motion-two-system-depleting", "same pair with an exhaustible budget of 200"},
    {"motion-two-class", "eight planar double integrators in two classes, budget 200 per step"},
    {"common-target", "scalar pair sharing one equilibrium with a budget matching its effort"},
  };
}

Scenario make_preset(const std::string & name)
{
  if (name == "two-system") { return two_system(10.0); }
  if (name == "two-system-ample") { return two_system(20.0); }
  if (name == "two-system-unstable") { return two_system_unstable(); }
  if (name == "motion-two-system") {
    return motion(name, kMotionPairB, kMotionPairP, {BudgetMode::ConstantPerStep, 20.0});
  }
  if (name == "motion-two-system-depleting") {
    return motion(name, kMotionPairB, kMotionPairP, {BudgetMode::Depleting, 200.0});
  }
  if (name == "motion-two-class") {
    return motion(name,
      {{0.2, 0.2}, {0.19, 0.19}, {0.194, 0.194}, {0.186, 0.186}, {1.0, 1.0}, {0.95, 0.95}, {0.97, 0.97}, {0.93, 0.93}},
      {{10.0, -13.0}, {-7.0, 2.0}, {6.0, 3.0}, {8.0, -4.0}, {2.0, -5.0}, {1.0, 2.0}, {-10.0, -13.0}, {-4.0, -1.0}},
      {BudgetMode::ConstantPerStep, 200.0});
  }
  if (name == "common-target") {
    auto sc = make_scalar_ensemble({0.5, 0.75}, {0.1, 0.05}, {0.0, 0.0}, {2.0, 2.0}, 20.0);
    sc.name = name;
    return sc;
  }
  throw std::invalid_argument("unknown preset '" + name + "'");
}

}  // namespace fairmpc
