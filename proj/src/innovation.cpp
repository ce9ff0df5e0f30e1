#include "sqvar/innovation.hpp"

#include <cmath>
#include <stdexcept>

#include "sqvar/rng.hpp"
#include "sqvar/select.hpp"

namespace sqvar {

double recover_rank(const SqvarFit& fit, const SplineBasis& basis,
                    const Eigen::VectorXd& c_full, double y, bool* clamped) {
  if (c_full.size() != fit.gamma.rows()) {
    throw std::invalid_argument("recover_rank: coordinate size mismatch");
  }
  // Quantile curve q(tau) = (c^T gamma) b(tau); nondecreasing when the
  // coordinates are nonnegative.
  const Eigen::RowVectorXd cg = c_full.transpose() * fit.gamma;
  auto q = [&](double tau) { return cg.dot(basis.eval(tau)); };

  double lo = kRankClampLo, hi = kRankClampHi;
  const double qlo = q(lo), qhi = q(hi);
  const double scale = std::max(1.0, std::max(std::abs(qlo), std::abs(qhi)));
  if (std::abs(qhi - qlo) <= 1e-14 * scale) {
    throw std::runtime_error("recover_rank: non-invertible quantile curve");
  }
  if (clamped) *clamped = false;
  if (y <= qlo) {
    if (clamped) *clamped = true;
    return lo;
  }
  if (y >= qhi) {
    if (clamped) *clamped = true;
    return hi;
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double qm = q(mid);
    if (std::abs(qm - y) <= 1e-8 * scale) return mid;
    if (qm < y) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo < 1e-15) break;
  }
  return 0.5 * (lo + hi);
}

RankMatrix recover_ranks(const std::vector<SqvarFit>& fits,
                         const SplineBasis& basis, const Eigen::MatrixXd& C,
                         const Eigen::MatrixXd& responses) {
  const int n = static_cast<int>(fits.size());
  const Eigen::Index Teff = C.rows();
  RankMatrix out;
  out.u_hat.resize(n, Teff);
  int clamp_count = 0;
#pragma omp parallel for reduction(+ : clamp_count) schedule(static)
  for (Eigen::Index t = 0; t < Teff; ++t) {
    for (int i = 0; i < n; ++i) {
      bool cl = false;
      out.u_hat(i, t) = recover_rank(fits[i], basis, C.row(t).transpose(),
                                     responses(t, i), &cl);
      if (cl) ++clamp_count;
    }
  }
  out.n_clamped = clamp_count;
  return out;
}

double gaussian_copula_loglik(const Eigen::MatrixXd& z, double kappa) {
  const int n = static_cast<int>(z.rows());
  const Eigen::Index T = z.cols();
  const double om = 1.0 - kappa;
  const double tr = 1.0 + (n - 1) * kappa;  // eigenvalue along the ones vector
  if (om <= 0.0 || tr <= 0.0) return -std::numeric_limits<double>::infinity();
  const double logdet = (n - 1) * std::log(om) + std::log(tr);
  // R^{-1} = (I - kappa/(1+(n-1)kappa) 11^T) / (1 - kappa)
  const double c1 = 1.0 / om;
  const double c2 = kappa / (om * tr);
  double acc = 0.0;
  for (Eigen::Index t = 0; t < T; ++t) {
    const double ss = z.col(t).squaredNorm();
    const double s = z.col(t).sum();
    const double quad = c1 * ss - c2 * s * s;
    acc += -0.5 * logdet - 0.5 * (quad - ss);
  }
  return acc;
}

CopulaModel fit_gaussian_copula(const RankMatrix& ranks) {
  const int n = static_cast<int>(ranks.u_hat.rows());
  const Eigen::Index T = ranks.u_hat.cols();
  if (n < 2) throw std::invalid_argument("fit_gaussian_copula: n must be >= 2");
  if (T < 10) throw std::invalid_argument("fit_gaussian_copula: need T >= 10");

  Eigen::MatrixXd z(n, T);
  for (int i = 0; i < n; ++i) {
    const double lo = ranks.u_hat.row(i).minCoeff();
    const double hi = ranks.u_hat.row(i).maxCoeff();
    if (hi - lo <= 0.0) {
      throw std::runtime_error("fit_gaussian_copula: degenerate rank column " +
                               std::to_string(i + 1));
    }
    for (Eigen::Index t = 0; t < T; ++t) z(i, t) = norm_quantile(ranks.u_hat(i, t));
  }

  double lo = -1.0 / (n - 1) + 1e-4;
  double hi = 1.0 - 1e-4;
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
  double f1 = gaussian_copula_loglik(z, x1), f2 = gaussian_copula_loglik(z, x2);
  for (int it = 0; it < 200 && hi - lo > 1e-10; ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + gr * (hi - lo);
      f2 = gaussian_copula_loglik(z, x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - gr * (hi - lo);
      f1 = gaussian_copula_loglik(z, x1);
    }
  }
  CopulaModel m;
  m.n = n;
  m.kappa = 0.5 * (lo + hi);
  m.loglik = gaussian_copula_loglik(z, m.kappa);
  const double box_lo = -1.0 / (n - 1) + 1e-4, box_hi = 1.0 - 1e-4;
  m.at_boundary =
      (m.kappa - box_lo < 1e-6 * (box_hi - box_lo)) || (box_hi - m.kappa < 1e-6 * (box_hi - box_lo));
  return m;
}

InnovationEstimates innovation_covariance(const std::vector<SqvarFit>& fits,
                                          const CoordinateSystem& cs,
                                          const SplineBasis& basis,
                                          const GramMatrix& G,
                                          const RankMatrix& ranks,
                                          double eps_zero) {
  const int n = static_cast<int>(fits.size());
  const Eigen::Index T = ranks.u_hat.cols();
  InnovationEstimates est;
  est.eps_hat.resize(n, T);
  est.mu_hat.resize(n);

  for (int i = 0; i < n; ++i) {
    // theta_0 curve of equation i, via the inverse simplex map at each rank.
    const auto act_pairs = active_set(fits[i], G, eps_zero, cs.n);
    std::set<int> act;
    for (const auto& [l, j] : act_pairs) act.insert(1 + (j - 1) * cs.n + l);
    for (Eigen::Index t = 0; t < T; ++t) {
      const Eigen::VectorXd phi_full = fits[i].phi_at(basis, ranks.u_hat(i, t));
      double theta0;
      Eigen::VectorXd theta;
      sqvar_to_qvar(cs, phi_full(0), phi_full.tail(cs.N()), act, theta0, theta);
      est.eps_hat(i, t) = theta0;
    }
    est.mu_hat(i) = est.eps_hat.row(i).mean();
    est.eps_hat.row(i).array() -= est.mu_hat(i);
  }
  est.cov_hat = est.eps_hat * est.eps_hat.transpose() / static_cast<double>(T);
  est.cov_hat = 0.5 * (est.cov_hat + est.cov_hat.transpose()).eval();
  return est;
}

}  // namespace sqvar
