#include "fairmpc/model.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <complex>
#include <sstream>
#include <stdexcept>

namespace fairmpc {

namespace {

std::string fmt_num(double v)
{
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

bool is_stabilizable(const LtiSystem & system, double tol)
{
  const auto & a = system.a_matrix;
  const auto & b = system.b_matrix;
  const Eigen::Index n = a.rows();
  if (n == 0) { return true; }

  Eigen::EigenSolver<Matrix> es(a, false);
  const Eigen::VectorXcd lambdas = es.eigenvalues();
  for (Eigen::Index k = 0; k < lambdas.size(); ++k) {
    const std::complex<double> lambda = lambdas(k);
    if (std::abs(lambda) < 1.0) { continue; }
    Eigen::MatrixXcd pbh(n, n + b.cols());
    pbh.leftCols(n) = a.cast<std::complex<double>>() - lambda * Eigen::MatrixXcd::Identity(n, n);
    pbh.rightCols(b.cols()) = b.cast<std::complex<double>>();
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(pbh);
    const Eigen::VectorXd sv = svd.singularValues();
    const double scale = std::max(1.0, sv.size() > 0 ? sv(0) : 0.0);
    const auto rank = std::count_if(sv.data(), sv.data() + sv.size(), [&](double s) { return s > tol * scale; });
    if (rank < n) { return false; }
  }
  return true;
}

PolytopeSet PolytopeSet::unconstrained(int dim) { return PolytopeSet{Matrix(0, dim), Vector(0)}; }

PolytopeSet PolytopeSet::box(const Vector & lo, const Vector & hi)
{
  const auto d = lo.size();
  PolytopeSet p{Matrix::Zero(2 * d, d), Vector(2 * d)};
  p.h_matrix.topRows(d).setIdentity();
  p.h_matrix.bottomRows(d) = -Matrix::Identity(d, d);
  p.h_vector << hi, -lo;
  return p;
}

bool PolytopeSet::contains(const Vector & z, double tol) const
{
  if (z.size() != dim()) { return false; }
  if (is_unconstrained()) { return true; }
  return ((h_matrix * z - h_vector).array() <= tol).all();
}

bool PolytopeSet::contains_in_interior(const Vector & z, double margin) const
{
  if (z.size() != dim()) { return false; }
  if (is_unconstrained()) { return true; }
  return ((h_matrix * z - h_vector).array() < -margin).all();
}

int Scenario::num_weight_groups() const
{
  return classes ? static_cast<int>(classes->size()) : num_systems();
}

int Scenario::weight_group_of(int i) const
{
  if (!classes) { return i; }
  for (std::size_t c = 0; c < classes->size(); ++c) {
    const auto & members = (*classes)[c];
    if (std::find(members.begin(), members.end(), i) != members.end()) { return static_cast<int>(c); }
  }
  throw std::invalid_argument("system " + std::to_string(i) + " belongs to no class");
}

EnsembleModel build_ensemble(const Scenario & scenario)
{
  if (scenario.systems.empty()) { throw std::invalid_argument("scenario has no systems"); }
  const int n = scenario.state_dim();
  const int m = scenario.input_dim();
  const int big_n = scenario.num_systems();
  for (int i = 0; i < big_n; ++i) {
    const auto & s = scenario.systems[i];
    if (s.a_matrix.rows() != n || s.a_matrix.cols() != n || s.b_matrix.rows() != n || s.b_matrix.cols() != m) {
      throw std::invalid_argument("system " + std::to_string(i) + " has dimensions inconsistent with system 0");
    }
  }

  EnsembleModel e;
  e.num_systems = big_n;
  e.n = n;
  e.m = m;
  e.a = Matrix::Zero(n * big_n, n * big_n);
  e.b = Matrix::Zero(n * big_n, m * big_n);
  e.x_s = Vector::Zero(n * big_n);
  e.u_s = Vector::Zero(m * big_n);
  for (int i = 0; i < big_n; ++i) {
    e.a.block(i * n, i * n, n, n) = scenario.systems[i].a_matrix;
    e.b.block(i * n, i * m, n, m) = scenario.systems[i].b_matrix;
    if (i < static_cast<int>(scenario.targets.size())) {
      const auto & tgt = scenario.targets[i];
      if (tgt.x_s.size() == n) { e.x_s.segment(i * n, n) = tgt.x_s; }
      if (tgt.u_s.size() == m) { e.u_s.segment(i * m, m) = tgt.u_s; }
    }
  }
  return e;
}

EquilibriumInput compute_equilibrium_input(const LtiSystem & system, const Vector & x_s)
{
  const Eigen::Index n = system.a_matrix.rows();
  if (x_s.size() != n) { throw std::invalid_argument("equilibrium state has wrong dimension"); }
  const Vector rhs = (Matrix::Identity(n, n) - system.a_matrix) * x_s;
  // complete orthogonal decomposition gives the minimum-norm least-squares solution
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(system.b_matrix);
  cod.setThreshold(1e-12);
  const Vector u = cod.solve(rhs);
  EquilibriumInput out;
  out.residual = (system.b_matrix * u - rhs).lpNorm<1>();
  if (out.residual <= 1e-8) { out.u_s = u; }
  return out;
}

bool ValidationReport::has_error(const std::string & code) const
{
  return std::any_of(errors.begin(), errors.end(), [&](const auto & e) { return e.code == code; });
}

bool ValidationReport::has_warning(const std::string & code) const
{
  return std::any_of(warnings.begin(), warnings.end(), [&](const auto & e) { return e.code == code; });
}

double min_symmetric_eigenvalue(const Matrix & m)
{
  if (m.size() == 0) { return 0.0; }
  const Matrix sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

ValidationReport validate_scenario(const Scenario & sc)
{
  ValidationReport rep;
  auto error = [&](std::string code, std::string msg, std::optional<int> sys = std::nullopt) {
    rep.errors.push_back({std::move(code), std::move(msg), sys});
  };

  const int big_n = sc.num_systems();
  if (big_n == 0) {
    error("empty", "scenario has no systems");
    return rep;
  }
  const int n = sc.state_dim();
  const int m = sc.input_dim();

  std::vector<bool> dims_ok(big_n, true);
  for (int i = 0; i < big_n; ++i) {
    const auto & s = sc.systems[i];
    if (s.a_matrix.rows() != s.a_matrix.cols()) {
      error("a_not_square", "system " + std::to_string(i) + ": A is not square", i);
      dims_ok[i] = false;
    } else if (s.b_matrix.rows() != s.a_matrix.rows()) {
      error("b_rows", "system " + std::to_string(i) + ": B row count differs from A", i);
      dims_ok[i] = false;
    } else if (s.state_dim() != n || s.input_dim() != m) {
      error("dimension_homogeneity",
        "system " + std::to_string(i) + " has n=" + std::to_string(s.state_dim()) + ", m="
          + std::to_string(s.input_dim()) + " but system 0 has n=" + std::to_string(n) + ", m=" + std::to_string(m),
        i);
      dims_ok[i] = false;
    }
  }

  for (int i = 0; i < big_n; ++i) {
    if (dims_ok[i] && !is_stabilizable(sc.systems[i])) {
      error("not_stabilizable", "system " + std::to_string(i) + " is not stabilizable", i);
    }
  }

  if (static_cast<int>(sc.targets.size()) != big_n) {
    error("targets", "expected " + std::to_string(big_n) + " targets");
  } else {
    for (int i = 0; i < big_n; ++i) {
      if (!dims_ok[i]) { continue; }
      const auto & t = sc.targets[i];
      if (t.x_s.size() != n || t.u_s.size() != m) {
        error("target_dimension", "target " + std::to_string(i) + " has wrong dimension", i);
        continue;
      }
      const auto & s = sc.systems[i];
      const double res = (t.x_s - s.a_matrix * t.x_s - s.b_matrix * t.u_s).lpNorm<1>();
      if (res > 1e-8) {
        error("not_equilibrium", "target " + std::to_string(i) + " is not an equilibrium (residual " + fmt_num(res) + ")", i);
      }
    }
  }

  auto check_sets = [&](const std::vector<PolytopeSet> & sets, int dim, const char * what, bool is_input) {
    if (sets.empty()) { return; }
    if (static_cast<int>(sets.size()) != big_n) {
      error(std::string(what) + "_count", std::string("expected one ") + what + " per system");
      return;
    }
    for (int i = 0; i < big_n; ++i) {
      const auto & p = sets[i];
      if (p.dim() != dim || p.h_vector.size() != p.rows()) {
        error(std::string(what) + "_dimension", std::string(what) + " " + std::to_string(i) + " has wrong dimension", i);
        continue;
      }
      if (static_cast<int>(sc.targets.size()) == big_n && dims_ok[i]) {
        const Vector & z = is_input ? sc.targets[i].u_s : sc.targets[i].x_s;
        if (z.size() == dim && !p.contains_in_interior(z)) {
          error(std::string(what) + "_interior",
            std::string("target of system ") + std::to_string(i) + " is not in the interior of its " + what, i);
        }
      }
    }
  };
  check_sets(sc.input_sets, m, "input_set", true);
  check_sets(sc.state_sets, n, "state_set", false);

  if (static_cast<int>(sc.initial_states.size()) != big_n) {
    error("initial_states", "expected " + std::to_string(big_n) + " initial states");
  } else {
    for (int i = 0; i < big_n; ++i) {
      if (sc.initial_states[i].size() != n) { error("initial_state_dimension", "initial state " + std::to_string(i) + " has wrong dimension", i); }
    }
  }

  if (!(sc.budget.u_bar_0 > 0.0)) { error("budget", "budget u_bar_0 must be positive"); }
  if (sc.horizon_l < 1) { error("horizon", "horizon must be at least 1"); }
  if (sc.sim_steps_t < 1) { error("sim_steps", "simulation steps must be at least 1"); }

  if (sc.classes) {
    std::vector<int> seen(big_n, 0);
    bool bad_index = false;
    for (const auto & cls : *sc.classes) {
      for (int idx : cls) {
        if (idx < 0 || idx >= big_n) {
          bad_index = true;
        } else {
          ++seen[idx];
        }
      }
    }
    if (bad_index) { error("class_index", "class lists an index outside the system range"); }
    for (int i = 0; i < big_n; ++i) {
      if (seen[i] != 1) {
        error("class_partition",
          "system " + std::to_string(i) + " appears in " + std::to_string(seen[i]) + " classes", i);
      }
    }
  }

  const auto & w = sc.weights;
  const int groups = sc.num_weight_groups();
  if (static_cast<int>(w.q_weights.size()) != big_n) {
    error("q_weights", "expected " + std::to_string(big_n) + " Q weights");
  } else {
    for (int i = 0; i < big_n; ++i) {
      const auto & q = w.q_weights[i];
      if (q.rows() != n || q.cols() != n) {
        error("q_dimension", "Q weight " + std::to_string(i) + " has wrong dimension", i);
      } else if (!q.isApprox(q.transpose(), 1e-12) || min_symmetric_eigenvalue(q) <= 1e-12) {
        error("q_not_pd", "Q weight " + std::to_string(i) + " is not symmetric positive definite", i);
      }
    }
  }
  if (static_cast<int>(w.rho_bar.size()) != groups) {
    error("rho_bar", "expected " + std::to_string(groups) + " rho_bar entries");
  } else if (std::any_of(w.rho_bar.begin(), w.rho_bar.end(), [](double r) { return !(r >= 0.0); })) {
    error("rho_bar_negative", "rho_bar entries must be nonnegative");
  }
  if (static_cast<int>(w.w_bar.size()) != groups) {
    error("w_bar", "expected " + std::to_string(groups) + " w_bar entries");
  } else {
    for (int g = 0; g < groups; ++g) {
      const auto & wb = w.w_bar[g];
      if (wb.rows() != n || wb.cols() != n) {
        error("w_bar_dimension", "w_bar " + std::to_string(g) + " has wrong dimension");
      } else if (min_symmetric_eigenvalue(wb) < -1e-12) {
        error("w_bar_not_psd", "w_bar " + std::to_string(g) + " is not positive semidefinite");
      }
    }
  }
  if (!(w.gamma_u >= 0.0)) { error("gamma_u", "gamma_u must be nonnegative"); }
  if (w.gamma_e.rows() != n || w.gamma_e.cols() != n) {
    error("gamma_e", "gamma_e must be n x n");
  } else if ((w.gamma_e.array() < 0.0).any()) {
    error("gamma_e", "gamma_e must be nonnegative");
  }
  if (!(w.beta > 0.0)) { error("beta", "beta must be positive"); }
  if (!(w.lambda_x > 0.0) || !(w.lambda_u > 0.0)) { error("lambda", "slack penalties must be positive"); }

  if (rep.ok()) {
    double effort = 0.0;
    for (const auto & t : sc.targets) { effort += t.u_s.lpNorm<1>(); }
    if (effort > sc.budget.u_bar_0) {
      rep.warnings.push_back({"budget_infeasible_target",
        "equilibrium effort " + fmt_num(effort) + " exceeds budget " + fmt_num(sc.budget.u_bar_0), std::nullopt});
    }
  }
  return rep;
}

Vector plant_step(const LtiSystem & system, const Vector & x, const Vector & u)
{
  if (x.size() != system.state_dim() || u.size() != system.input_dim()) {
    throw std::invalid_argument("plant_step: dimension mismatch");
  }
  return system.a_matrix * x + system.b_matrix * u;
}

Vector plant_step(const EnsembleModel & ensemble, const Vector & x, const Vector & u)
{
  if (x.size() != ensemble.nx() || u.size() != ensemble.nu()) {
    throw std::invalid_argument("plant_step: dimension mismatch");
  }
  return ensemble.a * x + ensemble.b * u;
}

}  // namespace fairmpc
