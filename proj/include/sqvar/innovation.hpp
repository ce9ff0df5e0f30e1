#pragma once

#include <Eigen/Dense>
#include <vector>

#include "sqvar/solver.hpp"

namespace sqvar {

struct RankMatrix {
  Eigen::MatrixXd u_hat;  // n x Teff
  int n_clamped = 0;
};

// Gaussian copula with a single equicorrelation parameter.
struct CopulaModel {
  double kappa = 0.0;
  int n = 0;
  double loglik = 0.0;
  bool at_boundary = false;
};

struct InnovationEstimates {
  Eigen::MatrixXd eps_hat;  // n x Teff
  Eigen::VectorXd mu_hat;
  Eigen::MatrixXd cov_hat;
};

inline constexpr double kRankClampLo = 1e-4;
inline constexpr double kRankClampHi = 1.0 - 1e-4;

// Invert the fitted quantile curve tau -> c^T Phi(tau) at response y by
// bisection; result clamped to [1e-4, 1-1e-4]. `clamped` reports whether the
// clamp band was hit.
double recover_rank(const SqvarFit& fit, const SplineBasis& basis,
                    const Eigen::VectorXd& c_full, double y,
                    bool* clamped = nullptr);

// Ranks for every (series, time) pair of an estimated system.
RankMatrix recover_ranks(const std::vector<SqvarFit>& fits,
                         const SplineBasis& basis, const Eigen::MatrixXd& C,
                         const Eigen::MatrixXd& responses);

// Log-likelihood of the equicorrelation Gaussian copula at given ranks.
double gaussian_copula_loglik(const Eigen::MatrixXd& z_scores, double kappa);

// Golden-section MLE over the positive-definiteness box.
CopulaModel fit_gaussian_copula(const RankMatrix& ranks);

// eps_it = theta_0i(U_it) - mu_i with theta_0 recovered from each fit.
InnovationEstimates innovation_covariance(const std::vector<SqvarFit>& fits,
                                          const CoordinateSystem& cs,
                                          const SplineBasis& basis,
                                          const GramMatrix& G,
                                          const RankMatrix& ranks,
                                          double eps_zero = 1e-6);

}  // namespace sqvar
