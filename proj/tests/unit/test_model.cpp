#include "doctest.h"
#include "fairmpc/model.hpp"
#include "fairmpc/presets.hpp"

using namespace fairmpc;

namespace {

LtiSystem scalar(double a, double b) { return {Matrix::Constant(1, 1, a), Matrix::Constant(1, 1, b), ""}; }

Vector v(std::initializer_list<double> xs)
{
  Vector out(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index k = 0;
  for (double x : xs) { out(k++) = x; }
  return out;
}

}  // namespace

TEST_CASE("ensemble of the two-system preset is block diagonal")
{
  const auto ens = build_ensemble(make_preset("two-system"));
  CHECK(ens.num_systems == 2);
  CHECK(ens.a.isApprox((Matrix(2, 2) << 0.4, 0.0, 0.0, 0.9).finished()));
  CHECK(ens.b.isApprox((Matrix(2, 2) << 0.1, 0.0, 0.0, 0.1).finished()));
  CHECK(ens.u_s.isApprox(v({12.0, 2.0})));
}

TEST_CASE("single-system ensemble equals the system")
{
  auto sc = make_scalar_ensemble({0.7}, {0.3}, {0.0}, {1.0}, 5.0);
  const auto ens = build_ensemble(sc);
  CHECK(ens.a(0, 0) == doctest::Approx(0.7));
  CHECK(ens.b(0, 0) == doctest::Approx(0.3));
}

TEST_CASE("motion ensemble stacks two double integrators")
{
  const auto ens = build_ensemble(make_preset("motion-two-system"));
  CHECK(ens.a.rows() == 8);
  CHECK(ens.a.block(0, 0, 4, 4).isApprox(ens.a.block(4, 4, 4, 4)));
  CHECK(ens.a.block(0, 4, 4, 4).isZero());
  CHECK(ens.a(0, 2) == 1.0);
  CHECK(ens.a(1, 3) == 1.0);
}

TEST_CASE("equilibrium inputs")
{
  CHECK((*compute_equilibrium_input(scalar(0.4, 0.1), v({2.0})).u_s)(0) == doctest::Approx(12.0));
  CHECK((*compute_equilibrium_input(scalar(0.9, 0.1), v({2.0})).u_s)(0) == doctest::Approx(2.0));
  const auto motion = compute_equilibrium_input(motion_system(0.2, 0.2), v({10.0, -13.0, 0.0, 0.0}));
  REQUIRE(motion.u_s);
  CHECK(motion.u_s->isZero(1e-12));

  SUBCASE("moving target has no equilibrium input")
  {
    const auto bad = compute_equilibrium_input(motion_system(1.0, 1.0), v({0.0, 0.0, 1.0, 0.0}));
    CHECK_FALSE(bad.u_s);
    CHECK(bad.residual > 1e-8);
  }
}

TEST_CASE("budget warning depends on the equilibrium effort")
{
  const auto tight = validate_scenario(make_preset("two-system"));
  CHECK(tight.ok());
  REQUIRE(tight.has_warning("budget_infeasible_target"));
  CHECK(tight.warnings.front().message == "equilibrium effort 14 exceeds budget 10");
  const auto ample = validate_scenario(make_preset("two-system-ample"));
  CHECK(ample.ok());
  CHECK(ample.warnings.empty());
}

TEST_CASE("mixed state dimensions are rejected")
{
  auto sc = make_preset("two-system");
  sc.systems[1] = motion_system(1.0, 1.0);
  const auto rep = validate_scenario(sc);
  CHECK(rep.has_error("dimension_homogeneity"));
  REQUIRE_FALSE(rep.errors.empty());
  CHECK(rep.errors.front().system == 1);
  CHECK_THROWS_AS((void)build_ensemble(sc), std::invalid_argument);
}

TEST_CASE("validation catches structural problems")
{
  auto sc = make_preset("two-system");
  SUBCASE("target off equilibrium")
  {
    sc.targets[0].u_s(0) = 11.0;
    CHECK(validate_scenario(sc).has_error("not_equilibrium"));
  }
  SUBCASE("class partition with a repeated system")
  {
    sc.classes = std::vector<std::vector<int>>{{0, 1}, {1}};
    sc.weights.rho_bar = {3.0, 3.0};
    sc.weights.w_bar = {Matrix::Identity(1, 1), Matrix::Identity(1, 1)};
    CHECK(validate_scenario(sc).has_error("class_partition"));
  }
  SUBCASE("target on the input set boundary")
  {
    sc.input_sets[0] = PolytopeSet::box(v({-12.0}), v({12.0}));
    CHECK(validate_scenario(sc).has_error("input_set_interior"));
  }
  SUBCASE("unstabilizable plant")
  {
    sc.systems[0].b_matrix.setZero();
    sc.systems[0].a_matrix(0, 0) = 1.2;
    CHECK(validate_scenario(sc).has_error("not_stabilizable"));
  }
}

TEST_CASE("stabilizability test")
{
  CHECK(is_stabilizable(scalar(1.5, 0.1)));
  CHECK(is_stabilizable(scalar(0.5, 0.0)));
  CHECK_FALSE(is_stabilizable(scalar(1.0, 0.0)));
  CHECK(is_stabilizable(motion_system(0.2, 0.2)));
}

TEST_CASE("plant steps")
{
  CHECK(plant_step(scalar(0.4, 0.1), v({0.0}), v({10.0}))(0) == doctest::Approx(1.0));
  CHECK(plant_step(scalar(0.4, 0.1), v({2.0}), v({12.0}))(0) == doctest::Approx(2.0));
  CHECK(plant_step(motion_system(1.0, 1.0), Vector::Zero(4), v({2.0, -5.0})).isApprox(v({0.0, 0.0, 2.0, -5.0})));
  CHECK_THROWS_AS((void)plant_step(scalar(0.4, 0.1), v({1.0, 2.0}), v({1.0})), std::invalid_argument);
}

TEST_CASE("ensemble step matches per-system steps")
{
  const auto sc = make_preset("motion-two-class");
  const auto ens = build_ensemble(sc);
  Vector x = Vector::LinSpaced(ens.nx(), -3.0, 5.0);
  Vector u = Vector::LinSpaced(ens.nu(), 2.0, -1.0);
  const Vector stacked = plant_step(ens, x, u);
  for (int i = 0; i < ens.num_systems; ++i) {
    const Vector local = plant_step(sc.systems[i], x.segment(i * 4, 4), u.segment(i * 2, 2));
    CHECK((stacked.segment(i * 4, 4) - local).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("polytope interior implies membership")
{
  const auto box = PolytopeSet::box(v({-1.0, -2.0}), v({1.0, 2.0}));
  for (double x = -1.5; x <= 1.5; x += 0.25) {
    const Vector z = v({x, 0.5 * x});
    if (box.contains_in_interior(z)) { CHECK(box.contains(z)); }
  }
  CHECK(box.contains(v({1.0, 2.0})));
  CHECK_FALSE(box.contains_in_interior(v({1.0, 0.0})));
  CHECK(PolytopeSet::unconstrained(3).contains(v({1e9, -1e9, 0.0})));
}
