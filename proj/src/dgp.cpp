#include "sqvar/dgp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sqvar/irf.hpp"
#include "sqvar/rng.hpp"

namespace sqvar {

namespace {

constexpr double kDivergenceGuard = 1e8;

// F(x) = 3x^2 - 2x^3 on [0,1] is the Beta(2,2) CDF; invert by bisection.
double beta22_quantile(double tau) {
  if (tau <= 0.0) return 0.0;
  if (tau >= 1.0) return 1.0;
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 60; ++it) {
    double mid = 0.5 * (lo + hi);
    double f = mid * mid * (3.0 - 2.0 * mid);
    (f < tau ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

Eigen::VectorXd draw_ranks(Rng& rng, int n, double kappa) {
  Eigen::VectorXd g(n);
  for (int i = 0; i < n; ++i) g(i) = rng.normal();
  Eigen::VectorXd z = equicorrelated_normals(g, kappa);
  for (int i = 0; i < n; ++i) z(i) = norm_cdf(z(i));
  return z;
}

double spectral_norm(const Eigen::MatrixXd& a) {
  return a.jacobiSvd().singularValues()(0);
}

}  // namespace

TimeSeriesPanel simulate_qvar(const CoefficientFunctions& coefs,
                              const CopulaModel& copula, int T, int burn_in,
                              std::uint64_t seed) {
  const int n = coefs.n, p = coefs.p, N = coefs.N();
  if (T <= 0 || burn_in < 0) throw std::invalid_argument("simulate_qvar: bad sizes");
  Rng rng(seed, 0);

  // state(j, l) = y_{l, t-1-j}: row 0 holds the most recent observation.
  Eigen::MatrixXd state = Eigen::MatrixXd::Zero(p, n);
  TimeSeriesPanel out;
  out.values.resize(T, n);
  out.series_names.resize(n);
  for (int i = 0; i < n; ++i) out.series_names[i] = "y" + std::to_string(i + 1);

  Eigen::VectorXd ynew(n);
  for (int t = 0; t < burn_in + T; ++t) {
    Eigen::VectorXd u = draw_ranks(rng, n, copula.kappa);
    for (int i = 0; i < n; ++i) {
      double v = coefs.theta0[i](u(i));
      for (int k = 0; k < N; ++k) {
        if (!coefs.active_mask[i][k]) continue;
        v += coefs.theta[i][k](u(i)) * state(k / n, k % n);
      }
      if (!std::isfinite(v) || std::abs(v) > kDivergenceGuard)
        throw std::runtime_error("simulate_qvar: path diverged");
      ynew(i) = v;
    }
    for (int j = p - 1; j > 0; --j) state.row(j) = state.row(j - 1);
    state.row(0) = ynew.transpose();
    if (t >= burn_in) out.values.row(t - burn_in) = ynew.transpose();
  }
  return out;
}

Eigen::MatrixXd companion_matrix(const CoefficientFunctions& coefs,
                                 const Eigen::VectorXd& u) {
  const int n = coefs.n, p = coefs.p, N = coefs.N();
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(N, N);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < N; ++k)
      if (coefs.active_mask[i][k]) comp(i, k) = coefs.theta[i][k](u(i));
  if (p > 1) comp.block(n, 0, N - n, N - n).setIdentity();
  return comp;
}

StationarityReport check_stationarity(const CoefficientFunctions& coefs,
                                      int u_grid_size) {
  const int n = coefs.n, p = coefs.p;
  std::vector<Eigen::VectorXd> candidates;
  for (int g = 0; g < u_grid_size; ++g) {
    double tau = (g + 0.5) / u_grid_size;
    candidates.push_back(Eigen::VectorXd::Constant(n, tau));
  }
  Rng rng(0x5eed5eedULL, 7);
  for (int r = 0; r < 200; ++r) {
    Eigen::VectorXd u(n);
    for (int i = 0; i < n; ++i) u(i) = rng.uniform();
    candidates.push_back(u);
  }

  std::vector<double> sup_norm(p, 0.0);
  Eigen::MatrixXd aj(n, n);
  for (const auto& u : candidates) {
    for (int j = 0; j < p; ++j) {
      for (int i = 0; i < n; ++i)
        for (int l = 0; l < n; ++l) {
          int k = j * n + l;
          aj(i, l) = coefs.active_mask[i][k] ? coefs.theta[i][k](u(i)) : 0.0;
        }
      sup_norm[j] = std::max(sup_norm[j], spectral_norm(aj));
    }
  }
  StationarityReport rep;
  for (double s : sup_norm) rep.rho += s;
  rep.condition_met = rep.rho < 1.0 / p;
  rep.grid_size = u_grid_size;
  return rep;
}

void study1_dgp(int b, CoefficientFunctions& coefs, CopulaModel& copula) {
  if (b < 1) throw std::invalid_argument("study1_dgp: b must be positive");
  const int n = 3, p = 2;
  double bd = b;
  coefs.n = n;
  coefs.p = p;
  coefs.theta0.assign(n, [](double tau) { return 1.0 + beta22_quantile(tau); });
  std::vector<CoefFn> lag1 = {
      [bd](double tau) { return (0.1 * tau + 0.2 * std::sqrt(tau)) / bd; },
      [bd](double tau) { return (0.1 * tau + 0.2 * beta22_quantile(tau)) / bd; },
      [bd](double tau) { return (0.1 * tau + 0.2 * tau * tau) / bd; }};
  CoefFn zero = [](double) { return 0.0; };
  coefs.theta.assign(n, {});
  coefs.active_mask.assign(n, std::vector<bool>(n * p, false));
  for (int i = 0; i < n; ++i) {
    coefs.theta[i] = {lag1[0], lag1[1], lag1[2], zero, zero, zero};
    for (int l = 0; l < n; ++l) coefs.active_mask[i][l] = true;
  }
  copula.kappa = 0.3;
  copula.n = n;
}

std::vector<CoefFn> study2_phi() {
  return {[](double tau) { return 0.2 * norm_quantile(tau); },
          [](double tau) { return 3.0 * tau + 6.0 * std::sqrt(tau); },
          [](double tau) { return 3.0 * tau + 6.0 * norm_cdf(2.0 * tau - 1.0); },
          [](double tau) { return 3.0 * tau + 6.0 * tau * tau; }};
}

Study2Result simulate_study2(int T, std::uint64_t seed, double copula_kappa,
                             double stabilize_tol, int stabilize_window,
                             int max_steps) {
  const int n = 3, p = 2, N = n * p;
  auto phi = study2_phi();
  Rng rng(seed, 1);

  Eigen::VectorXd lb = Eigen::VectorXd::Constant(n, 1e300);
  Eigen::VectorXd ub = Eigen::VectorXd::Constant(n, -1e300);
  // Intercept-only warm-up so each series starts with a nondegenerate range.
  Eigen::MatrixXd state(p, n);  // row 0 = most recent
  for (int j = p - 1; j >= 0; --j) {
    Eigen::VectorXd u = draw_ranks(rng, n, copula_kappa);
    for (int i = 0; i < n; ++i) {
      state(j, i) = phi[0](u(i));
      lb(i) = std::min(lb(i), state(j, i));
      ub(i) = std::max(ub(i), state(j, i));
    }
  }
  for (int i = 0; i < n; ++i)
    if (!(ub(i) > lb(i))) ub(i) = lb(i) + 1e-3;

  std::vector<Eigen::VectorXd> tail;  // last T observations
  tail.reserve(static_cast<size_t>(T));
  int last_change = 0;
  int stabilized_at = -1;
  Eigen::VectorXd ynew(n);
  int step = 0;
  for (; step < max_steps; ++step) {
    Eigen::VectorXd u = draw_ranks(rng, n, copula_kappa);
    for (int i = 0; i < n; ++i) {
      double phi0 = phi[0](u(i));
      double v = phi0;
      double theta0_adj = 0.0;
      for (int l = 0; l < n; ++l) {
        double delta = ub(l) - lb(l);
        double th = (phi[1 + l](u(i)) - phi0) / (N * delta);
        theta0_adj -= lb(l) * th;
        v += th * state(0, l);
      }
      v += theta0_adj;
      if (!std::isfinite(v) || std::abs(v) > kDivergenceGuard)
        throw std::runtime_error("simulate_study2: path diverged");
      ynew(i) = v;
    }
    for (int j = p - 1; j > 0; --j) state.row(j) = state.row(j - 1);
    state.row(0) = ynew.transpose();

    for (int i = 0; i < n; ++i) {
      double scale = std::max(1.0, std::max(std::abs(lb(i)), std::abs(ub(i))));
      if (ynew(i) < lb(i)) {
        if (lb(i) - ynew(i) > stabilize_tol * scale) last_change = step;
        lb(i) = ynew(i);
      }
      if (ynew(i) > ub(i)) {
        if (ynew(i) - ub(i) > stabilize_tol * scale) last_change = step;
        ub(i) = ynew(i);
      }
    }

    if (stabilized_at < 0) {
      if (step - last_change >= stabilize_window) stabilized_at = step;
    } else {
      tail.push_back(ynew);
      if (static_cast<int>(tail.size()) == T) break;
    }
  }
  if (static_cast<int>(tail.size()) < T)
    throw std::runtime_error("simulate_study2: bounds did not stabilize");

  Study2Result res;
  res.panel.values.resize(T, n);
  res.panel.series_names = {"y1", "y2", "y3"};
  for (int t = 0; t < T; ++t) res.panel.values.row(t) = tail[t].transpose();
  res.bounds.lb = lb;
  res.bounds.ub = ub;
  res.steps_to_stabilize = stabilized_at + 1;
  return res;
}

double crossing_frequency(const Eigen::MatrixXd& qhat) {
  if (qhat.rows() == 0 || qhat.cols() < 2) return 0.0;
  long violations = 0;
  for (Eigen::Index t = 0; t < qhat.rows(); ++t)
    for (Eigen::Index k = 0; k + 1 < qhat.cols(); ++k)
      if (qhat(t, k + 1) < qhat(t, k)) ++violations;
  return static_cast<double>(violations) / qhat.rows();
}

Eigen::MatrixXd quantile_curves(const SqvarFit& fit, const EquationData& data,
                                const SplineBasis& basis, int grid_points) {
  Eigen::MatrixXd b(grid_points, basis.H());
  for (int k = 0; k < grid_points; ++k)
    b.row(k) = basis.eval((k + 1.0) / (grid_points + 1.0)).transpose();
  return data.C * fit.gamma * b.transpose();
}

}  // namespace sqvar
