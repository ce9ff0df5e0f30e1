#include "sqvar/report.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sqvar {

Eigen::VectorXd interior_tau_grid(int grid_points) {
  Eigen::VectorXd g(grid_points);
  for (int k = 0; k < grid_points; ++k) g(k) = (k + 1.0) / (grid_points + 1.0);
  return g;
}

Eigen::MatrixXd theta_curves(const SqvarFit& fit, const CoordinateSystem& cs,
                             const SplineBasis& basis,
                             const Eigen::VectorXd& tau_grid,
                             const std::set<int>& active) {
  const int N = cs.N();
  Eigen::MatrixXd out(N + 1, tau_grid.size());
  for (Eigen::Index k = 0; k < tau_grid.size(); ++k) {
    Eigen::VectorXd phi = fit.phi_at(basis, tau_grid(k));
    double theta0;
    Eigen::VectorXd theta;
    sqvar_to_qvar(cs, phi(0), phi.tail(N), active, theta0, theta);
    out(0, k) = theta0;
    out.col(k).tail(N) = theta;
  }
  return out;
}

void RmseAccumulator::add(const Eigen::MatrixXd& theta_hat,
                          const Eigen::MatrixXd& theta_true) {
  if (theta_hat.rows() != theta_true.rows() ||
      theta_hat.cols() != sumsq_.size() || theta_true.cols() != sumsq_.size())
    throw std::invalid_argument("RmseAccumulator: shape mismatch");
  sumsq_ += (theta_hat - theta_true).array().square().colwise().sum().matrix().transpose();
  n_curves_ = theta_hat.rows();
  ++reps_;
}

Eigen::VectorXd RmseAccumulator::rmse_tau() const {
  if (reps_ == 0) return Eigen::VectorXd::Zero(sumsq_.size());
  return (sumsq_ / double(n_curves_ * reps_)).array().sqrt();
}

double RmseAccumulator::rmse_all() const {
  if (reps_ == 0) return 0.0;
  return std::sqrt(sumsq_.sum() / double(n_curves_ * reps_ * sumsq_.size()));
}

std::set<int> design_columns(const std::set<LagPair>& pairs, int n) {
  std::set<int> cols;
  for (const auto& [l, j] : pairs) cols.insert((j - 1) * n + l + 1);
  return cols;
}

void SelectionTally::add(const std::set<LagPair>& estimated,
                         const std::set<LagPair>& truth) {
  ++total;
  if (estimated == truth) ++exact;
  if (std::includes(estimated.begin(), estimated.end(), truth.begin(),
                    truth.end()))
    ++superset;
}

}  // namespace sqvar
