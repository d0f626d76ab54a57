#include "doctest.h"
#include "fairmpc/qp.hpp"

using namespace fairmpc;

namespace {

SparseMatrix sparse(const Matrix & m) { return m.sparseView(); }

QpProblem problem(const Matrix & p, const Vector & q, const Matrix & a, const Vector & b, const Matrix & g, const Vector & h)
{
  QpProblem qp;
  qp.p = sparse(p);
  qp.q = q;
  qp.a_eq = sparse(a);
  qp.b_eq = b;
  qp.g_ineq = sparse(g);
  qp.h_ineq = h;
  return qp;
}

}  // namespace

TEST_CASE("equality and active inequality")
{
  // KKT by hand: z1 + z2 = 1 with z1 <= 0.2 active gives z = (0.2, 0.8)
  const auto qp = problem(Matrix::Identity(2, 2), -Vector::Ones(2), Matrix::Ones(1, 2), Vector::Ones(1),
    (Matrix(1, 2) << 1.0, 0.0).finished(), Vector::Constant(1, 0.2));
  const auto res = solve_qp(qp);
  REQUIRE(res.status == QpStatus::Solved);
  CHECK(res.z(0) == doctest::Approx(0.2).epsilon(1e-7));
  CHECK(res.z(1) == doctest::Approx(0.8).epsilon(1e-7));
  CHECK(res.objective == doctest::Approx(-0.66).epsilon(1e-7));
  CHECK(res.lambda_ineq(0) >= 0.0);
}

TEST_CASE("linear objective with a lower bound")
{
  const auto qp = problem(Matrix::Zero(1, 1), Vector::Ones(1), Matrix::Zero(0, 1), Vector::Zero(0),
    -Matrix::Identity(1, 1), Vector::Constant(1, 3.0));
  const auto res = solve_qp(qp);
  REQUIRE(res.status == QpStatus::Solved);
  CHECK(res.z(0) == doctest::Approx(-3.0).epsilon(1e-7));
}

TEST_CASE("unconstrained quadratic")
{
  Matrix p(2, 2);
  p << 4.0, 1.0, 1.0, 3.0;
  const Vector q = (Vector(2) << 1.0, 2.0).finished();
  const auto res = solve_qp(problem(p, q, Matrix::Zero(0, 2), Vector::Zero(0), Matrix::Zero(0, 2), Vector::Zero(0)));
  REQUIRE(res.status == QpStatus::Solved);
  const Vector expected = p.ldlt().solve(-q);
  CHECK((res.z - expected).norm() <= 1e-8);
}

TEST_CASE("contradictory bounds produce a Farkas certificate")
{
  Matrix g(2, 1);
  g << -1.0, 1.0;  // z >= 1 and z <= 0
  const Vector h = (Vector(2) << -1.0, 0.0).finished();
  const auto qp = problem(Matrix::Identity(1, 1), Vector::Zero(1), Matrix::Zero(0, 1), Vector::Zero(0), g, h);
  const auto res = solve_qp(qp);
  REQUIRE(res.status == QpStatus::Infeasible);
  REQUIRE(res.certificate);
  const auto & c = *res.certificate;
  CHECK(c.lambda_ineq.minCoeff() >= -1e-12);
  CHECK((g.transpose() * c.lambda_ineq).norm() <= 1e-8 * c.lambda_ineq.norm());
  CHECK(h.dot(c.lambda_ineq) < 0.0);
  CHECK(c.violation == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("inconsistent equalities are infeasible")
{
  Matrix a(2, 1);
  a << 1.0, 1.0;
  const Vector b = (Vector(2) << 1.0, 2.0).finished();
  const auto res =
    solve_qp(problem(Matrix::Identity(1, 1), Vector::Zero(1), a, b, Matrix::Zero(0, 1), Vector::Zero(0)));
  CHECK(res.status == QpStatus::Infeasible);
}
