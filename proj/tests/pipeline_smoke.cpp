#include <doctest.h>

#include "sqvar/dgp.hpp"
#include "sqvar/report.hpp"
#include "sqvar/select.hpp"

using namespace sqvar;

// End-to-end shape check at the scale of the empirical application: six
// series, lag order six, T = 1500. Data are two independent trivariate
// simulations side by side; only the first equation is fit to keep the
// runtime down.
TEST_CASE("six-series lag-six pipeline") {
  CoefficientFunctions coefs;
  CopulaModel copula;
  study1_dgp(2, coefs, copula);
  auto a = simulate_qvar(coefs, copula, 1500, 500, 301);
  auto b = simulate_qvar(coefs, copula, 1500, 500, 302);

  TimeSeriesPanel panel;
  panel.values.resize(1500, 6);
  panel.values.leftCols(3) = a.values;
  panel.values.rightCols(3) = b.values;

  const int p = 6;
  auto cs = CoordinateSystem::create(compute_bounds(panel), p);
  auto design = build_lagged_design(panel, p);
  REQUIRE(design.rows.rows() == 1500 - p);
  REQUIRE(design.rows.cols() == 6 * p + 1);

  SplineBasis basis(1);
  auto grid = QuantileGrid::make(30);
  auto data = make_equation_data(design, cs, 0);
  auto lambdas = default_lambda_grid(1500, {1.0, 2.0});
  auto sel = select_lambda(data, cs, basis, grid, 0, lambdas);

  REQUIRE(sel.best_fit.gamma.rows() == 6 * p + 1);
  REQUIRE(sel.best_fit.gamma.cols() == basis.H());
  CHECK(sel.best_fit.gamma.allFinite());
  CHECK(sel.s1_hat >= 0);
  CHECK(sel.s1_hat <= 6 * p);

  // the fitted curves never cross on the evaluation grid
  auto curves = quantile_curves(sel.best_fit, data, basis);
  CHECK(crossing_frequency(curves) == 0.0);

  // coefficient curves come back with exact zeros off the active set
  auto taus = interior_tau_grid(9);
  auto theta = theta_curves(sel.best_fit, cs, basis, taus,
                            design_columns(sel.active_set, 6));
  REQUIRE(theta.rows() == 6 * p + 1);
  auto cols = design_columns(sel.active_set, 6);
  for (int r = 1; r <= 6 * p; ++r) {
    if (!cols.count(r)) CHECK(theta.row(r).cwiseAbs().maxCoeff() == 0.0);
  }
}
