#pragma once

#include <Eigen/Dense>
#include <set>
#include <utility>
#include <vector>

#include "sqvar/panel.hpp"

namespace sqvar {

struct ScreenConfig {
  int p = 1;
  std::vector<double> tau_grid = {0.1, 0.25, 0.5, 0.75, 0.9};
  double nu_T = 0.0;
  int top_k = 0;  // when > 0, keep the K largest max-over-tau statistics instead
};

// Left-continuous inverse of the empirical CDF: inf{y : Fhat(y) >= tau}.
double empirical_quantile(const Eigen::VectorXd& y, double tau);

// Two-parameter quantile regression y ~ b0 + b1 x, minimized exactly up to
// bracketing tolerance on the convex profile in the slope.
void marginal_qr(const Eigen::VectorXd& y, const Eigen::VectorXd& x, double tau,
                 double& b0, double& b1);

// (1/T) sum (b0 + b1 x_t - Qhat_y(tau))^2.
double screen_statistic(const Eigen::VectorXd& y, const Eigen::VectorXd& x,
                        double tau);

struct ScreenEntry {
  int series = 0;  // 0-based predictor series
  int lag = 1;     // 1-based lag
  double max_statistic = 0.0;
  std::vector<double> statistics;  // per tau grid point
  bool selected = false;
};

struct ScreenResult {
  std::vector<ScreenEntry> entries;  // all n*p predictors in (lag, series) order
  std::set<std::pair<int, int>> selected;
};

ScreenResult screen(const TimeSeriesPanel& panel, const ScreenConfig& cfg,
                    int target_series);

}  // namespace sqvar
