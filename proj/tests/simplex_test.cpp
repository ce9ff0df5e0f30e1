#include <doctest.h>

#include "sqvar/rng.hpp"
#include "sqvar/simplex.hpp"

using namespace sqvar;

namespace {

CoordinateSystem make_cs(std::initializer_list<double> lb,
                         std::initializer_list<double> ub, int p) {
  SeriesBounds b;
  b.lb = Eigen::VectorXd::Map(lb.begin(), lb.size());
  b.ub = Eigen::VectorXd::Map(ub.begin(), ub.size());
  return CoordinateSystem::create(b, p);
}

}  // namespace

TEST_CASE("lower vertex maps to c0 = 1") {
  auto cs = make_cs({1.0, -2.0}, {3.0, 4.0}, 2);
  Eigen::VectorXd w(5);
  w << 1.0, 1.0, -2.0, 1.0, -2.0;
  auto r = barycentric(cs, w);
  CHECK(r.c.cwiseAbs().maxCoeff() == 0.0);
  CHECK(r.c0 == doctest::Approx(1.0));
  CHECK(r.in_bounds);
}

TEST_CASE("opposite vertex in one dimension") {
  auto cs = make_cs({0.0}, {2.0}, 1);
  Eigen::VectorXd w(2);
  w << 1.0, 2.0;
  auto r = barycentric(cs, w);
  CHECK(r.c(0) == doctest::Approx(1.0));
  CHECK(r.c0 == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("partition of unity for in-bounds rows") {
  auto cs = make_cs({-1.0, 0.5, 2.0}, {1.0, 1.5, 7.0}, 2);
  Rng rng(5, 0);
  for (int rep = 0; rep < 200; ++rep) {
    Eigen::VectorXd w(7);
    w(0) = 1.0;
    for (int k = 1; k <= 6; ++k) {
      int l = (k - 1) % 3;
      w(k) = cs.bounds.lb(l) + rng.uniform() * cs.delta(l);
    }
    auto r = barycentric(cs, w);
    CHECK(r.in_bounds);
    CHECK(r.c0 + r.c.sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.c.minCoeff() >= 0.0);
  }
}

TEST_CASE("out-of-bounds rows are flagged, not rejected") {
  auto cs = make_cs({0.0}, {1.0}, 1);
  Eigen::VectorXd w(2);
  w << 1.0, 1.5;
  auto r = barycentric(cs, w);
  CHECK_FALSE(r.in_bounds);
  CHECK(r.c0 + r.c.sum() == doctest::Approx(1.0));
  CHECK(r.c0 < 0.0);
}

TEST_CASE("forward transform worked values") {
  // theta = 0: phi and phi_0 coincide with theta_0
  auto cs1 = make_cs({0.3}, {0.9}, 1);
  double phi0;
  Eigen::VectorXd phi;
  qvar_to_sqvar(cs1, 1.0, Eigen::VectorXd::Zero(1), phi0, phi);
  CHECK(phi0 == doctest::Approx(1.0));
  CHECK(phi(0) == doctest::Approx(1.0));

  auto cs2 = make_cs({0.0, 0.0}, {1.0, 1.0}, 1);
  Eigen::VectorXd theta(2);
  theta << 0.5, 0.3;
  qvar_to_sqvar(cs2, 1.0, theta, phi0, phi);
  CHECK(phi0 == doctest::Approx(1.0));
  CHECK(phi(0) == doctest::Approx(2.0));
  CHECK(phi(1) == doctest::Approx(1.6));

  auto cs3 = make_cs({-1.0}, {1.0}, 1);
  Eigen::VectorXd one(1);
  one << 1.0;
  qvar_to_sqvar(cs3, 0.0, one, phi0, phi);
  CHECK(phi0 == doctest::Approx(-1.0));
  CHECK(phi(0) == doctest::Approx(1.0));
}

TEST_CASE("inverse transform worked values") {
  auto cs = make_cs({0.0, 0.0}, {1.0, 1.0}, 1);
  Eigen::VectorXd phi(2);
  phi << 2.0, 1.6;
  double theta0;
  Eigen::VectorXd theta;
  sqvar_to_qvar(cs, 1.0, phi, {1, 2}, theta0, theta);
  CHECK(theta0 == doctest::Approx(1.0));
  CHECK(theta(0) == doctest::Approx(0.5));
  CHECK(theta(1) == doctest::Approx(0.3));

  // inactive collapse
  Eigen::VectorXd flat = Eigen::VectorXd::Constant(2, 0.7);
  sqvar_to_qvar(cs, 0.7, flat, {}, theta0, theta);
  CHECK(theta0 == doctest::Approx(0.7));
  CHECK(theta.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("round trip identity over random draws") {
  auto cs = make_cs({-2.0, 0.1, 3.0}, {1.0, 0.6, 10.0}, 2);
  Rng rng(21, 0);
  std::set<int> full;
  for (int k = 1; k <= 6; ++k) full.insert(k);
  for (int rep = 0; rep < 500; ++rep) {
    double theta0 = 4.0 * rng.uniform() - 2.0;
    Eigen::VectorXd theta(6);
    for (int k = 0; k < 6; ++k) theta(k) = 2.0 * rng.uniform() - 1.0;
    double phi0, t0;
    Eigen::VectorXd phi, t;
    qvar_to_sqvar(cs, theta0, theta, phi0, phi);
    sqvar_to_qvar(cs, phi0, phi, full, t0, t);
    CHECK(t0 == doctest::Approx(theta0).epsilon(1e-12));
    CHECK((t - theta).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("quantile value equivalence in both coordinate systems") {
  auto cs = make_cs({-1.0, 2.0}, {1.5, 5.0}, 2);
  Rng rng(22, 0);
  for (int rep = 0; rep < 300; ++rep) {
    Eigen::VectorXd w(5);
    w(0) = 1.0;
    for (int k = 1; k <= 4; ++k) {
      int l = (k - 1) % 2;
      w(k) = cs.bounds.lb(l) + rng.uniform() * cs.delta(l);
    }
    double theta0 = rng.uniform();
    Eigen::VectorXd theta(4);
    for (int k = 0; k < 4; ++k) theta(k) = rng.uniform() - 0.5;
    double phi0;
    Eigen::VectorXd phi;
    qvar_to_sqvar(cs, theta0, theta, phi0, phi);
    auto r = barycentric(cs, w);
    double lhs = theta0 + w.tail(4).dot(theta);
    double rhs = r.c0 * phi0 + r.c.dot(phi);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
  }
}

TEST_CASE("monotone phi implies monotone quantile curve") {
  auto cs = make_cs({0.0, -1.0}, {2.0, 1.0}, 1);
  Rng rng(23, 0);
  // phi curves: increasing affine functions of tau
  Eigen::VectorXd slope(3), icept(3);
  for (int k = 0; k < 3; ++k) {
    slope(k) = rng.uniform();
    icept(k) = rng.uniform() - 0.5;
  }
  Eigen::VectorXd w(3);
  w << 1.0, 0.75, 0.2;
  auto r = barycentric(cs, w);
  REQUIRE(r.in_bounds);
  double prev = -1e300;
  for (int g = 1; g <= 99; ++g) {
    double tau = g / 100.0;
    double q = r.c0 * (icept(0) + slope(0) * tau) +
               r.c(0) * (icept(1) + slope(1) * tau) +
               r.c(1) * (icept(2) + slope(2) * tau);
    CHECK(q >= prev);
    prev = q;
  }
}

TEST_CASE("batch coordinates match the scalar path") {
  auto cs = make_cs({0.0, 0.0}, {1.0, 2.0}, 1);
  Eigen::MatrixXd rows(2, 3);
  rows << 1.0, 0.5, 1.0, 1.0, 0.25, 2.5;
  int oob = 0;
  auto C = barycentric_rows(cs, rows, &oob);
  CHECK(oob == 1);
  for (int t = 0; t < 2; ++t) {
    auto r = barycentric(cs, rows.row(t).transpose());
    CHECK(C(t, 0) == doctest::Approx(r.c0));
    CHECK(C(t, 1) == doctest::Approx(r.c(0)));
    CHECK(C(t, 2) == doctest::Approx(r.c(1)));
  }
}
