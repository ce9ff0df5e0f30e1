#include "sqvar/irf.hpp"

#include <cmath>
#include <stdexcept>

#include "sqvar/rng.hpp"

namespace sqvar {

namespace {

Eigen::VectorXd design_row_from_state(const Eigen::MatrixXd& state, int n, int p) {
  Eigen::VectorXd w(n * p + 1);
  w(0) = 1.0;
  for (int j = 0; j < p; ++j)
    for (int l = 0; l < n; ++l) w(1 + j * n + l) = state(j, l);
  return w;
}

void roll_state(Eigen::MatrixXd& state, const Eigen::VectorXd& y_next) {
  for (Eigen::Index j = state.rows() - 1; j >= 1; --j) state.row(j) = state.row(j - 1);
  state.row(0) = y_next.transpose();
}

}  // namespace

Eigen::VectorXd equicorrelated_normals(const Eigen::VectorXd& g, double kappa) {
  const int m = static_cast<int>(g.size());
  if (m == 1) return g;
  const double alpha = std::sqrt(1.0 - kappa);
  const double top = 1.0 + (m - 1) * kappa;
  if (top <= 0.0) throw std::invalid_argument("equicorrelated_normals: kappa outside PSD box");
  const double beta = (std::sqrt(top) - alpha) / m;
  return alpha * g + beta * g.sum() * Eigen::VectorXd::Ones(m);
}

Eigen::VectorXd forecast_one_step(const std::vector<SqvarFit>& fits,
                                  const CoordinateSystem& cs,
                                  const SplineBasis& basis,
                                  const Eigen::MatrixXd& state,
                                  const Eigen::VectorXd& u) {
  const int n = cs.n;
  if (state.rows() != cs.p || state.cols() != n) {
    throw std::invalid_argument("forecast_one_step: state must be p x n");
  }
  const Eigen::VectorXd w = design_row_from_state(state, n, cs.p);
  const BarycentricRow row = barycentric(cs, w);
  const Eigen::VectorXd c = row.full();
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    const Eigen::RowVectorXd cg = c.transpose() * fits[i].gamma;
    y(i) = cg.dot(basis.eval(u(i)));
    if (!std::isfinite(y(i))) {
      throw std::runtime_error("forecast_one_step: non-finite forecast");
    }
  }
  return y;
}

namespace {

struct PathOutput {
  Eigen::MatrixXd y;  // n x (h+1)
  int out_of_bounds = 0;
};

// One simulation path. `conditional` pins the shocked series' rank at impact
// and draws the rest from the conditional copula in normal scores.
PathOutput simulate_path(const std::vector<SqvarFit>& fits,
                         const CoordinateSystem& cs, const SplineBasis& basis,
                         const CopulaModel& copula, const ImpulseSpec& spec,
                         Rng& rng, bool conditional) {
  const int n = cs.n;
  const double kappa = copula.kappa;
  Eigen::MatrixXd state = spec.history;
  PathOutput out;
  out.y.resize(n, spec.horizon + 1);

  for (int s = 0; s <= spec.horizon; ++s) {
    Eigen::VectorXd g(n);
    for (int i = 0; i < n; ++i) g(i) = rng.normal();

    Eigen::VectorXd u(n);
    if (conditional && s == 0) {
      const int j = spec.shocked_series;
      const double zstar = norm_quantile(spec.shock_quantile);
      if (n > 1) {
        // keep the baseline's index alignment so common random numbers
        // cancel for the non-shocked series
        Eigen::VectorXd gsub(n - 1);
        int gi = 0;
        for (int i = 0; i < n; ++i)
          if (i != j) gsub(gi++) = g(i);
        // Conditional covariance of an equicorrelation matrix given one
        // coordinate: (1-k) I + (k - k^2) 11^T, mean k z* 1.
        const int m = n - 1;
        const double alpha = std::sqrt(1.0 - kappa);
        const double top = (1.0 - kappa) + m * (kappa - kappa * kappa);
        const double beta = (std::sqrt(top) - alpha) / m;
        const Eigen::VectorXd zsub =
            alpha * gsub + beta * gsub.sum() * Eigen::VectorXd::Ones(m) +
            kappa * zstar * Eigen::VectorXd::Ones(m);
        int idx = 0;
        for (int i = 0; i < n; ++i) {
          if (i == j) {
            u(i) = spec.shock_quantile;
          } else {
            u(i) = norm_cdf(zsub(idx++));
          }
        }
      } else {
        u(0) = spec.shock_quantile;
      }
    } else {
      const Eigen::VectorXd z = equicorrelated_normals(g, kappa);
      for (int i = 0; i < n; ++i) u(i) = norm_cdf(z(i));
    }
    for (int i = 0; i < n; ++i) u(i) = std::clamp(u(i), kRankClampLo, kRankClampHi);

    const Eigen::VectorXd w = design_row_from_state(state, n, cs.p);
    if (!barycentric(cs, w).in_bounds) ++out.out_of_bounds;
    Eigen::VectorXd y = forecast_one_step(fits, cs, basis, state, u);
    if (spec.clamp_to_bounds) {
      for (int i = 0; i < n; ++i) y(i) = std::clamp(y(i), cs.bounds.lb(i), cs.bounds.ub(i));
    }
    out.y.col(s) = y;
    roll_state(state, y);
  }
  return out;
}

}  // namespace

IrfResult generalized_irf(const std::vector<SqvarFit>& fits,
                          const CoordinateSystem& cs, const SplineBasis& basis,
                          const CopulaModel& copula, const ImpulseSpec& spec) {
  const int n = cs.n;
  if (copula.n != n) throw std::invalid_argument("generalized_irf: copula dimension");
  if (spec.n_sim < 2) throw std::invalid_argument("generalized_irf: n_sim must be >= 2");
  if (spec.history.rows() != cs.p || spec.history.cols() != n) {
    throw std::invalid_argument("generalized_irf: history must be p x n");
  }
  if (!(spec.shock_quantile > 0.0 && spec.shock_quantile < 1.0)) {
    throw std::invalid_argument("generalized_irf: shock quantile must be in (0,1)");
  }

  const int M = spec.n_sim;
  const int cols = spec.horizon + 1;
  // Per-path differences are stored and reduced in path order afterwards, so
  // the result does not depend on thread scheduling.
  std::vector<Eigen::MatrixXd> diffs(M);
  int oob = 0;

#pragma omp parallel for reduction(+ : oob) schedule(static)
  for (int m = 0; m < M; ++m) {
    Rng rng_c(spec.seed, static_cast<std::uint64_t>(m));
    Rng rng_b = spec.common_random_numbers
                    ? Rng(spec.seed, static_cast<std::uint64_t>(m))
                    : Rng(spec.seed, static_cast<std::uint64_t>(M + m));
    const PathOutput cond = simulate_path(fits, cs, basis, copula, spec, rng_c, true);
    const PathOutput base = simulate_path(fits, cs, basis, copula, spec, rng_b, false);
    diffs[m] = cond.y - base.y;
    oob += cond.out_of_bounds + base.out_of_bounds;
  }

  Eigen::MatrixXd sum_d = Eigen::MatrixXd::Zero(n, cols);
  Eigen::MatrixXd sum_d2 = Eigen::MatrixXd::Zero(n, cols);
  for (int m = 0; m < M; ++m) {
    sum_d += diffs[m];
    sum_d2 += diffs[m].cwiseProduct(diffs[m]);
  }

  IrfResult res;
  res.value = sum_d / static_cast<double>(M);
  const Eigen::MatrixXd var =
      (sum_d2 / static_cast<double>(M) - res.value.cwiseProduct(res.value)) *
      (static_cast<double>(M) / (M - 1.0));
  res.mc_se = (var.cwiseMax(0.0) / static_cast<double>(M)).cwiseSqrt();
  res.out_of_bounds_steps = oob;
  return res;
}

Eigen::MatrixXd scenario_forecast(const std::vector<SqvarFit>& fits,
                                  const CoordinateSystem& cs,
                                  const SplineBasis& basis,
                                  const Scenario& scenario,
                                  const Eigen::MatrixXd& state0,
                                  bool clamp_to_bounds,
                                  int* out_of_bounds_steps) {
  const int n = cs.n;
  if (scenario.tau_path.rows() != n) {
    throw std::invalid_argument("scenario_forecast: tau_path must have n rows");
  }
  if ((scenario.tau_path.array() <= 0.0).any() ||
      (scenario.tau_path.array() >= 1.0).any()) {
    throw std::invalid_argument("scenario_forecast: ranks must be in (0,1)");
  }
  const int h = static_cast<int>(scenario.tau_path.cols()) - 1;
  Eigen::MatrixXd state = state0;
  Eigen::MatrixXd out(n, h + 1);
  int oob = 0;
  for (int s = 0; s <= h; ++s) {
    const Eigen::VectorXd w = design_row_from_state(state, n, cs.p);
    if (!barycentric(cs, w).in_bounds) ++oob;
    Eigen::VectorXd y = forecast_one_step(fits, cs, basis, state, scenario.tau_path.col(s));
    if (clamp_to_bounds) {
      for (int i = 0; i < n; ++i) y(i) = std::clamp(y(i), cs.bounds.lb(i), cs.bounds.ub(i));
    }
    out.col(s) = y;
    roll_state(state, y);
  }
  if (out_of_bounds_steps) *out_of_bounds_steps = oob;
  return out;
}

Eigen::MatrixXd scenario_irf(const Eigen::MatrixXd& path_a,
                             const Eigen::MatrixXd& path_b) {
  if (path_a.rows() != path_b.rows() || path_a.cols() != path_b.cols()) {
    throw std::invalid_argument("scenario_irf: shape mismatch");
  }
  return path_a - path_b;
}

}  // namespace sqvar
