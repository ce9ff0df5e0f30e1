#pragma once

#include <Eigen/Dense>
#include <set>

#include "sqvar/basis.hpp"
#include "sqvar/select.hpp"
#include "sqvar/simplex.hpp"
#include "sqvar/solver.hpp"

namespace sqvar {

// Fitted QVAR coefficient curves for one equation on a tau grid: rows are
// (theta_0, theta_1, ..., theta_N), columns the grid points. Inactive groups
// come out as exact zeros through the inverse simplex map.
Eigen::MatrixXd theta_curves(const SqvarFit& fit, const CoordinateSystem& cs,
                             const SplineBasis& basis,
                             const Eigen::VectorXd& tau_grid,
                             const std::set<int>& active);

// Pointwise and overall RMSE across replications: each call to add()
// contributes the squared coefficient errors of one replication, all
// (N+1) curves pooled per grid point.
class RmseAccumulator {
 public:
  explicit RmseAccumulator(int grid_points)
      : sumsq_(Eigen::VectorXd::Zero(grid_points)) {}

  void add(const Eigen::MatrixXd& theta_hat, const Eigen::MatrixXd& theta_true);

  Eigen::VectorXd rmse_tau() const;  // per grid point
  double rmse_all() const;
  long replications() const { return reps_; }

 private:
  Eigen::VectorXd sumsq_;
  long n_curves_ = 0;
  long reps_ = 0;
};

// Exact-recovery and superset frequencies for BIC lag selection.
struct SelectionTally {
  long exact = 0;
  long superset = 0;
  long total = 0;

  void add(const std::set<LagPair>& estimated, const std::set<LagPair>& truth);
  double exact_rate() const { return total ? double(exact) / total : 0.0; }
  double superset_rate() const { return total ? double(superset) / total : 0.0; }
};

// tau_k = k / (grid_points + 1), k = 1..grid_points.
Eigen::VectorXd interior_tau_grid(int grid_points);

// 1-based design column indices of a set of (series, lag) pairs.
std::set<int> design_columns(const std::set<LagPair>& pairs, int n);

}  // namespace sqvar
