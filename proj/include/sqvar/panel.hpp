#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace sqvar {

// Bounded multivariate time series. `values` is T x n: time increases down
// the rows and each column is one series, matching the CSV layout.
struct TimeSeriesPanel {
  Eigen::MatrixXd values;               // T x n
  std::vector<std::string> series_names;

  int n() const { return static_cast<int>(values.cols()); }
  int T() const { return static_cast<int>(values.rows()); }
};

struct SeriesBounds {
  Eigen::VectorXd lb;
  Eigen::VectorXd ub;
};

// Stacked regressor rows W_t = (1, Y_{t-1}', ..., Y_{t-p}'), t = p+1..T.
struct LaggedDesign {
  Eigen::MatrixXd rows;       // (T-p) x (N+1)
  Eigen::MatrixXd responses;  // (T-p) x n, responses(r, i) = y_{i, p+1+r}
  int p = 0;
  int N = 0;  // n*p
};

TimeSeriesPanel load_csv(const std::string& path, bool has_header);
void write_csv(const TimeSeriesPanel& panel, const std::string& path);

// Empirical min/max per series, optionally widened by margin * range.
SeriesBounds compute_bounds(const TimeSeriesPanel& panel, double margin = 0.0);

LaggedDesign build_lagged_design(const TimeSeriesPanel& panel, int p);

}  // namespace sqvar
