#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "sqvar/innovation.hpp"
#include "sqvar/solver.hpp"

namespace sqvar {

struct ImpulseSpec {
  int shocked_series = 0;
  double shock_quantile = 0.5;
  int horizon = 0;
  int n_sim = 2000;
  std::uint64_t seed = 0;
  Eigen::MatrixXd history;  // p x n, oldest lag last row? see note below
  bool common_random_numbers = true;
  bool clamp_to_bounds = false;
};

// history rows are ordered most-recent-first: row 0 is Y_{t-1}, row j is
// Y_{t-1-j}. The forward recursion shifts rows down.

struct IrfResult {
  Eigen::MatrixXd value;  // n x (h+1)
  Eigen::MatrixXd mc_se;  // n x (h+1)
  int out_of_bounds_steps = 0;
};

struct Scenario {
  Eigen::MatrixXd tau_path;  // n x (h+1), entries in (0,1)
};

// Deterministic one-step map: evaluate every equation's fitted quantile curve
// at its rank u_i given the last p observations.
Eigen::VectorXd forecast_one_step(const std::vector<SqvarFit>& fits,
                                  const CoordinateSystem& cs,
                                  const SplineBasis& basis,
                                  const Eigen::MatrixXd& state,
                                  const Eigen::VectorXd& u);

// Monte-Carlo generalized impulse response: conditional-at-impact branch
// minus fully unconditional baseline.
IrfResult generalized_irf(const std::vector<SqvarFit>& fits,
                          const CoordinateSystem& cs, const SplineBasis& basis,
                          const CopulaModel& copula, const ImpulseSpec& spec);

// Deterministic scenario recursion; no copula involved.
Eigen::MatrixXd scenario_forecast(const std::vector<SqvarFit>& fits,
                                  const CoordinateSystem& cs,
                                  const SplineBasis& basis,
                                  const Scenario& scenario,
                                  const Eigen::MatrixXd& state,
                                  bool clamp_to_bounds = false,
                                  int* out_of_bounds_steps = nullptr);

Eigen::MatrixXd scenario_irf(const Eigen::MatrixXd& path_a,
                             const Eigen::MatrixXd& path_b);

// Equicorrelated normal draws: z = A g with A = alpha I + beta 11^T chosen so
// that A A^T equals the equicorrelation matrix. Exposed for tests.
Eigen::VectorXd equicorrelated_normals(const Eigen::VectorXd& g, double kappa);

}  // namespace sqvar
