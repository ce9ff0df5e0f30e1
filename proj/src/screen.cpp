#include "sqvar/screen.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sqvar/solver.hpp"

namespace sqvar {

double empirical_quantile(const Eigen::VectorXd& y, double tau) {
  if (y.size() == 0) throw std::invalid_argument("empirical_quantile: empty input");
  std::vector<double> s(y.data(), y.data() + y.size());
  std::sort(s.begin(), s.end());
  const auto T = static_cast<double>(s.size());
  auto idx = static_cast<std::ptrdiff_t>(std::ceil(tau * T)) - 1;
  idx = std::clamp<std::ptrdiff_t>(idx, 0, s.size() - 1);
  return s[static_cast<std::size_t>(idx)];
}

namespace {

// Check-loss profile R(b1) = min_b0 sum rho_tau(y - b0 - b1 x); the inner
// minimizer is the tau-quantile of the partial residuals.
double slope_profile(const Eigen::VectorXd& y, const Eigen::VectorXd& x,
                     double tau, double b1, double* b0_out = nullptr) {
  const Eigen::Index T = y.size();
  Eigen::VectorXd r = y - b1 * x;
  const double b0 = empirical_quantile(r, tau);
  double acc = 0.0;
  for (Eigen::Index t = 0; t < T; ++t) acc += check_loss(r(t) - b0, tau);
  if (b0_out) *b0_out = b0;
  return acc;
}

}  // namespace

void marginal_qr(const Eigen::VectorXd& y, const Eigen::VectorXd& x, double tau,
                 double& b0, double& b1) {
  if (y.size() != x.size() || y.size() < 3) {
    throw std::invalid_argument("marginal_qr: need equal-length inputs, T >= 3");
  }
  const double xrange = x.maxCoeff() - x.minCoeff();
  if (xrange <= 0.0) throw std::invalid_argument("marginal_qr: constant predictor");
  const double yrange = std::max(y.maxCoeff() - y.minCoeff(), 1e-12);

  // The profile in the slope is convex piecewise linear; golden-section on a
  // generous bracket converges to the minimizing flat.
  const double S = 4.0 * yrange / xrange + 1.0;
  double lo = -S, hi = S;
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
  double f1 = slope_profile(y, x, tau, x1), f2 = slope_profile(y, x, tau, x2);
  const double tol = 1e-11 * S;
  while (hi - lo > tol) {
    if (f1 > f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + gr * (hi - lo);
      f2 = slope_profile(y, x, tau, x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - gr * (hi - lo);
      f1 = slope_profile(y, x, tau, x1);
    }
  }
  b1 = 0.5 * (lo + hi);
  slope_profile(y, x, tau, b1, &b0);
}

double screen_statistic(const Eigen::VectorXd& y, const Eigen::VectorXd& x,
                        double tau) {
  double b0, b1;
  marginal_qr(y, x, tau, b0, b1);
  const double q = empirical_quantile(y, tau);
  const Eigen::ArrayXd d = b0 + b1 * x.array() - q;
  return d.square().mean();
}

ScreenResult screen(const TimeSeriesPanel& panel, const ScreenConfig& cfg,
                    int target_series) {
  const int n = panel.n();
  const int T = panel.T();
  const int p = cfg.p;
  if (T <= p + 10) throw std::invalid_argument("screen: need T > p + 10");
  if (cfg.tau_grid.empty()) throw std::invalid_argument("screen: empty tau grid");
  for (std::size_t a = 0; a + 1 < cfg.tau_grid.size(); ++a) {
    if (!(cfg.tau_grid[a] < cfg.tau_grid[a + 1])) {
      throw std::invalid_argument("screen: tau grid must be strictly increasing");
    }
  }

  const int Teff = T - p;
  Eigen::VectorXd yresp(Teff);
  for (int r = 0; r < Teff; ++r) yresp(r) = panel.values(p + r, target_series);

  const int n_pred = n * p;
  const int A = static_cast<int>(cfg.tau_grid.size());
  ScreenResult res;
  res.entries.resize(n_pred);

#pragma omp parallel for schedule(dynamic)
  for (int m = 0; m < n_pred; ++m) {
    const int l = m % n;
    const int j = m / n + 1;
    Eigen::VectorXd x(Teff);
    for (int r = 0; r < Teff; ++r) x(r) = panel.values(p + r - j, l);
    ScreenEntry e;
    e.series = l;
    e.lag = j;
    e.statistics.resize(A);
    for (int a = 0; a < A; ++a) {
      e.statistics[a] = screen_statistic(yresp, x, cfg.tau_grid[a]);
    }
    e.max_statistic = *std::max_element(e.statistics.begin(), e.statistics.end());
    res.entries[m] = std::move(e);
  }

  if (cfg.top_k > 0) {
    std::vector<int> order(n_pred);
    for (int m = 0; m < n_pred; ++m) order[m] = m;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return res.entries[a].max_statistic > res.entries[b].max_statistic;
    });
    for (int r = 0; r < std::min(cfg.top_k, n_pred); ++r) {
      res.entries[order[r]].selected = true;
    }
  } else {
    for (auto& e : res.entries) e.selected = e.max_statistic >= cfg.nu_T;
  }
  for (const auto& e : res.entries) {
    if (e.selected) res.selected.insert({e.series, e.lag});
  }
  return res;
}

}  // namespace sqvar
