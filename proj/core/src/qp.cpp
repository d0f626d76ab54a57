#include "fairmpc/qp.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace fairmpc {

double QpProblem::objective(const Vector & z) const { return 0.5 * z.dot(p * z) + q.dot(z) + constant; }

const char * to_string(QpStatus s)
{
  switch (s) {
    case QpStatus::Solved: return "solved";
    case QpStatus::Infeasible: return "infeasible";
    case QpStatus::MaxIterations: return "max_iterations";
    case QpStatus::NumericalError: return "numerical_error";
  }
  return "unknown";
}

namespace {

double inf_norm(const Vector & v) { return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>(); }

/// Largest alpha in (0, 1] with v + alpha dv >= 0.
double max_step(const Vector & v, const Vector & dv)
{
  double alpha = 1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (dv(i) < 0.0) { alpha = std::min(alpha, -v(i) / dv(i)); }
  }
  return alpha;
}

/**
 * Reduced KKT system
 *
 *   [ H   A' ] [dz]   [r1]
 *   [ A   0  ] [dy] = [r2]
 *
 * factored with a quasi-definite regularization and refined against the
 * unregularized matrix.
 */
class KktSolver
{
public:
  KktSolver(const SparseMatrix & a, double reg, int refine)
    : a_(a), at_(a.transpose()), base_reg_(reg), reg_(reg), refine_(refine)
  {
  }

  /// Factors with the base regularization, growing it when a pivot breaks down.
  bool factor(const SparseMatrix & h)
  {
    for (double reg = base_reg_; reg <= 1e-4; reg *= 100.0) {
      reg_ = reg;
      if (factor_once(h)) { return true; }
    }
    return false;
  }

  bool factor_once(const SparseMatrix & h)
  {
    h_ = h;
    const Eigen::Index n = h.rows();
    const Eigen::Index me = a_.rows();
    std::vector<Triplet> trip;
    trip.reserve(static_cast<std::size_t>(h.nonZeros() + 2 * a_.nonZeros() + n + me));
    for (int k = 0; k < h.outerSize(); ++k) {
      for (SparseMatrix::InnerIterator it(h, k); it; ++it) { trip.emplace_back(it.row(), it.col(), it.value()); }
    }
    for (Eigen::Index i = 0; i < n; ++i) { trip.emplace_back(i, i, reg_); }
    for (int k = 0; k < a_.outerSize(); ++k) {
      for (SparseMatrix::InnerIterator it(a_, k); it; ++it) {
        trip.emplace_back(n + it.row(), it.col(), it.value());
        trip.emplace_back(it.col(), n + it.row(), it.value());
      }
    }
    for (Eigen::Index i = 0; i < me; ++i) { trip.emplace_back(n + i, n + i, -reg_); }
    SparseMatrix k(n + me, n + me);
    k.setFromTriplets(trip.begin(), trip.end());
    ldlt_.compute(k);
    if (ldlt_.info() != Eigen::Success) { return false; }
    const Vector d = ldlt_.vectorD();
    return d.allFinite() && (d.array() != 0.0).all();
  }

  void solve(const Vector & r1, const Vector & r2, Vector & dz, Vector & dy) const
  {
    const Eigen::Index n = h_.rows();
    const Eigen::Index me = a_.rows();
    Vector rhs(n + me);
    rhs << r1, r2;
    Vector sol = ldlt_.solve(rhs);
    for (int it = 0; it < refine_; ++it) {
      Vector res(n + me);
      res.head(n) = r1 - h_ * sol.head(n) - at_ * sol.tail(me);
      res.tail(me) = r2 - a_ * sol.head(n);
      if (inf_norm(res) <= 1e-14 * (1.0 + inf_norm(rhs))) { break; }
      sol += ldlt_.solve(res);
    }
    dz = sol.head(n);
    dy = sol.tail(me);
  }

private:
  const SparseMatrix & a_;
  SparseMatrix at_;
  SparseMatrix h_;
  double base_reg_;
  double reg_;
  int refine_;
  Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt_;
};

struct IpmOutcome
{
  QpResult result;
  bool diverged = false;
};

IpmOutcome interior_point(const QpProblem & pb, const QpSettings & st)
{
  IpmOutcome out;
  QpResult & res = out.result;

  const Eigen::Index n = pb.q.size();
  const Eigen::Index me = pb.a_eq.rows();
  const Eigen::Index mi = pb.g_ineq.rows();

  const SparseMatrix p = SparseMatrix(0.5 * (pb.p + SparseMatrix(pb.p.transpose())));
  const SparseMatrix & a = pb.a_eq;
  const SparseMatrix & g = pb.g_ineq;
  const SparseMatrix gt = g.transpose();
  const SparseMatrix at = a.transpose();

  const double q_scale = 1.0 + inf_norm(pb.q);
  const double b_scale = 1.0 + inf_norm(pb.b_eq);
  const double h_scale = 1.0 + inf_norm(pb.h_ineq);

  KktSolver kkt(a, st.regularization, st.refinement_steps);

  // initial point: min 0.5 z'Pz + q'z + 0.5 ||h - Gz||^2 s.t. Az = b
  Vector z(n), y(me), s(mi), lam(mi);
  {
    SparseMatrix h0 = p + SparseMatrix(gt * g);
    if (!kkt.factor(h0)) {
      res.status = QpStatus::NumericalError;
      return out;
    }
    kkt.solve(-pb.q + gt * pb.h_ineq, pb.b_eq, z, y);
    if (mi == 0) {
      res.z = z;
      res.y_eq = y;
      res.lambda_ineq = Vector(0);
      res.objective = pb.objective(z);
      res.iterations = 1;
      res.primal_residual = inf_norm(a * z - pb.b_eq) / b_scale;
      res.dual_residual = inf_norm(p * z + pb.q + at * y) / q_scale;
      // a regularized solve of inconsistent equalities still returns a point, so check it
      if (res.primal_residual > st.tolerance) {
        res.status = QpStatus::Infeasible;
      } else {
        res.status = res.dual_residual <= st.tolerance ? QpStatus::Solved : QpStatus::NumericalError;
      }
      return out;
    }
    const Vector s_hat = pb.h_ineq - g * z;
    const double alpha_p = -s_hat.minCoeff();
    s = alpha_p < 0.0 ? s_hat : Vector(s_hat.array() + 1.0 + alpha_p);
    const Vector l_hat = -s_hat;
    const double alpha_d = -l_hat.minCoeff();
    lam = alpha_d < 0.0 ? l_hat : Vector(l_hat.array() + 1.0 + alpha_d);
  }

  Vector dz(n), dy(me), dlam(mi), ds(mi);
  auto newton = [&](const Vector & rd, const Vector & re, const Vector & ri, const Vector & rc) {
    // dlam = S^-1 (-rc + Lambda ri) + D G dz,   ds = -ri - G dz
    const Vector w = ((-rc.array() + lam.array() * ri.array()) / s.array()).matrix();
    kkt.solve(-rd - gt * w, -re, dz, dy);
    const Vector gdz = g * dz;
    dlam = w + ((lam.array() / s.array()) * gdz.array()).matrix();
    ds = -ri - gdz;
  };

  double best_merit = std::numeric_limits<double>::infinity();
  int stall = 0;
  for (int it = 0; it < st.max_iterations; ++it) {
    const Vector rd = p * z + pb.q + at * y + gt * lam;
    const Vector re = a * z - pb.b_eq;
    const Vector ri = g * z + s - pb.h_ineq;
    const double mu = s.dot(lam) / static_cast<double>(mi);
    const double pobj = pb.objective(z);

    res.iterations = it;
    res.primal_residual = std::max(inf_norm(re) / b_scale, inf_norm(ri) / h_scale);
    res.dual_residual = inf_norm(rd) / q_scale;
    res.gap = mu;

    if (res.primal_residual <= st.tolerance && res.dual_residual <= st.tolerance
        && s.dot(lam) <= st.tolerance * std::max(1.0, std::abs(pobj))) {
      res.status = QpStatus::Solved;
      break;
    }
    if (!std::isfinite(mu) || inf_norm(lam) > 1e13 || inf_norm(z) > 1e13) {
      out.diverged = true;
      res.status = QpStatus::NumericalError;
      break;
    }
    const double merit = std::max({res.primal_residual, res.dual_residual, mu});
    if (merit < 0.5 * best_merit) {
      best_merit = merit;
      stall = 0;
    } else if (++stall > 25) {
      out.diverged = true;
      res.status = QpStatus::MaxIterations;
      break;
    }

    const Vector d = (lam.array() / s.array()).matrix();
    SparseMatrix h = p + SparseMatrix(gt * d.asDiagonal() * g);
    if (!kkt.factor(h)) {
      res.status = QpStatus::NumericalError;
      break;
    }

    // predictor
    Vector rc = (s.array() * lam.array()).matrix();
    newton(rd, re, ri, rc);
    const double a_aff = std::min(max_step(s, ds), max_step(lam, dlam));
    const double mu_aff = (s + a_aff * ds).dot(lam + a_aff * dlam) / static_cast<double>(mi);
    const double sigma = std::pow(std::clamp(mu_aff / mu, 0.0, 1.0), 3);

    // corrector
    rc = (s.array() * lam.array() + ds.array() * dlam.array() - sigma * mu).matrix();
    newton(rd, re, ri, rc);
    const double step = std::min(1.0, 0.99 * std::min(max_step(s, ds), max_step(lam, dlam)));

    z += step * dz;
    y += step * dy;
    s += step * ds;
    lam += step * dlam;
    res.status = QpStatus::MaxIterations;
  }

  res.z = z;
  res.y_eq = y;
  res.lambda_ineq = lam;
  res.objective = pb.objective(z);
  return out;
}

/// min t  s.t. Az = b, Gz - t <= h, t >= -1 (plus a small proximal term on z).
std::optional<InfeasibilityCertificate> phase_one(const QpProblem & pb, const QpSettings & st)
{
  const int n = pb.num_variables();
  const Eigen::Index me = pb.a_eq.rows();
  const Eigen::Index mi = pb.g_ineq.rows();

  QpProblem ph;
  ph.q = Vector::Zero(n + 1);
  ph.q(n) = 1.0;
  std::vector<Triplet> pt;
  for (int i = 0; i < n; ++i) { pt.emplace_back(i, i, 1e-8); }
  ph.p.resize(n + 1, n + 1);
  ph.p.setFromTriplets(pt.begin(), pt.end());

  std::vector<Triplet> at;
  for (int k = 0; k < pb.a_eq.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(pb.a_eq, k); it; ++it) { at.emplace_back(it.row(), it.col(), it.value()); }
  }
  ph.a_eq.resize(me, n + 1);
  ph.a_eq.setFromTriplets(at.begin(), at.end());
  ph.b_eq = pb.b_eq;

  std::vector<Triplet> gt;
  for (int k = 0; k < pb.g_ineq.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(pb.g_ineq, k); it; ++it) { gt.emplace_back(it.row(), it.col(), it.value()); }
  }
  for (Eigen::Index r = 0; r < mi; ++r) { gt.emplace_back(r, n, -1.0); }
  gt.emplace_back(mi, n, -1.0);
  ph.g_ineq.resize(mi + 1, n + 1);
  ph.g_ineq.setFromTriplets(gt.begin(), gt.end());
  ph.h_ineq.resize(mi + 1);
  ph.h_ineq << pb.h_ineq, 1.0;

  QpSettings inner = st;
  inner.certify_infeasibility = false;
  const auto sol = interior_point(ph, inner).result;
  if (sol.status != QpStatus::Solved) { return std::nullopt; }
  const double t = sol.z(n);
  if (t <= 1e-6) { return std::nullopt; }

  InfeasibilityCertificate cert;
  cert.y_eq = sol.y_eq;
  cert.lambda_ineq = sol.lambda_ineq.head(mi);
  cert.farkas_value = pb.b_eq.dot(cert.y_eq) + pb.h_ineq.dot(cert.lambda_ineq);
  cert.violation = t;
  return cert;
}

}  // namespace

QpResult solve_qp(const QpProblem & problem, const QpSettings & settings)
{
  auto out = interior_point(problem, settings);
  if (out.result.status != QpStatus::Solved && settings.certify_infeasibility && problem.g_ineq.rows() > 0) {
    if (auto cert = phase_one(problem, settings)) {
      out.result.status = QpStatus::Infeasible;
      out.result.certificate = std::move(cert);
    }
  }
  return out.result;
}

}  // namespace fairmpc
