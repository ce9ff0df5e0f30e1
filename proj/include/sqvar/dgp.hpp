#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

#include "sqvar/innovation.hpp"
#include "sqvar/panel.hpp"
#include "sqvar/solver.hpp"

namespace sqvar {

using CoefFn = std::function<double(double)>;

// Quantile-dependent QVAR coefficients. theta[i][k] is the coefficient of
// design column k+1 (lag-block order) in equation i; inactive entries are
// identically zero.
struct CoefficientFunctions {
  int n = 0;
  int p = 0;
  std::vector<CoefFn> theta0;                  // per equation
  std::vector<std::vector<CoefFn>> theta;      // per equation, length n*p
  std::vector<std::vector<bool>> active_mask;  // same shape as theta

  int N() const { return n * p; }
};

struct StationarityReport {
  double rho = 0.0;
  bool condition_met = false;
  int grid_size = 0;
};

// Random-coefficient recursion y_it = theta_0i(U_it) + sum theta(U_it) y_lag,
// ranks drawn i.i.d. over t from the equicorrelation Gaussian copula.
TimeSeriesPanel simulate_qvar(const CoefficientFunctions& coefs,
                              const CopulaModel& copula, int T, int burn_in,
                              std::uint64_t seed);

// Companion matrix of the stacked order-one form at rank vector u (each
// equation evaluated at its own rank).
Eigen::MatrixXd companion_matrix(const CoefficientFunctions& coefs,
                                 const Eigen::VectorXd& u);

// rho = sum_j sup_u ||A_j(u)||_2 approximated over a common-value u grid
// plus random rank draws; condition_met = rho < 1/p (sufficient only).
StationarityReport check_stationarity(const CoefficientFunctions& coefs,
                                      int u_grid_size = 101);

// Built-in trivariate design, p = 2, first lag active, second inactive,
// identification strength 1/b, equicorrelation 0.3.
void study1_dgp(int b, CoefficientFunctions& coefs, CopulaModel& copula);

// SQVAR-coefficient generator with iterative bound calibration.
struct Study2Result {
  TimeSeriesPanel panel;
  SeriesBounds bounds;
  int steps_to_stabilize = 0;
};

// The SQVAR coefficient functions used by the generator (shared across the
// three equations): index 0 is phi_0, 1..3 the first-lag functions.
std::vector<CoefFn> study2_phi();

Study2Result simulate_study2(int T, std::uint64_t seed,
                             double copula_kappa = 0.3,
                             double stabilize_tol = 1e-6,
                             int stabilize_window = 500,
                             int max_steps = 100000);

// Average per-t count of adjacent-quantile order violations on the k/100 grid
// of precomputed curves (rows = t, cols = evaluation grid).
double crossing_frequency(const Eigen::MatrixXd& qhat);

// Fitted conditional quantile curves of one equation on the tau = k/100 grid.
Eigen::MatrixXd quantile_curves(const SqvarFit& fit, const EquationData& data,
                                const SplineBasis& basis, int grid_points = 99);

}  // namespace sqvar
