#include "sqvar/select.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sqvar {

double bic(const SqvarFit& fit, const EquationData& data, const SplineBasis& basis,
           const QuantileGrid& grid, int T_eff, int s1_hat) {
  if (fit.gamma.cols() != basis.H() || fit.gamma.rows() != data.C.cols()) {
    throw std::invalid_argument("bic: fit/data/basis shape mismatch");
  }
  const Eigen::MatrixXd B = basis.eval_rows(grid.taus);
  const Eigen::MatrixXd P = data.C * fit.gamma * B.transpose();
  double acc = 0.0;
  for (int l = 0; l < grid.L; ++l) {
    for (Eigen::Index t = 0; t < data.y.size(); ++t) {
      acc += check_loss(data.y(t) - P(t, l), grid.taus(l));
    }
  }
  acc /= static_cast<double>(grid.L) * static_cast<double>(data.y.size());
  if (acc <= 0.0) return -std::numeric_limits<double>::infinity();
  return std::log(acc) + static_cast<double>(s1_hat) * basis.H() *
                             std::log(static_cast<double>(T_eff)) /
                             (2.0 * static_cast<double>(T_eff));
}

std::vector<double> default_lambda_grid(int T, const std::vector<double>& c_values) {
  if (T < 3) throw std::invalid_argument("default_lambda_grid: T must be >= 3");
  if (c_values.empty()) throw std::invalid_argument("default_lambda_grid: empty c grid");
  std::vector<double> grid;
  grid.reserve(c_values.size());
  const double base = std::log(static_cast<double>(T)) / std::sqrt(static_cast<double>(T));
  for (double c : c_values) grid.push_back(c * base);
  std::sort(grid.begin(), grid.end());
  return grid;
}

std::set<LagPair> active_set(const SqvarFit& fit, const GramMatrix& G,
                             double eps_zero, int n) {
  std::set<LagPair> out;
  for (int k = 1; k < fit.gamma.rows(); ++k) {
    const Eigen::VectorXd d = (fit.gamma.row(k) - fit.gamma.row(0)).transpose();
    if (func_norm(G, d) > eps_zero) {
      const int l = (k - 1) % n;
      const int j = (k - 1) / n + 1;
      out.insert({l, j});
    }
  }
  return out;
}

SelectionResult select_lambda(const EquationData& data, const CoordinateSystem& cs,
                              const SplineBasis& basis, const QuantileGrid& grid,
                              int equation, const std::vector<double>& lambda_grid,
                              const SolverOptions& opts, double scad_a) {
  if (lambda_grid.empty()) throw std::invalid_argument("select_lambda: empty grid");
  const GramMatrix G = gram(basis);
  const int T_eff = static_cast<int>(data.y.size());

  SelectionResult res;
  res.lambda_grid = lambda_grid;

  double best_bic = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd warm;
  bool have_warm = false;
  for (double lambda : lambda_grid) {
    ScadPenalty pen{lambda, scad_a};
    SqvarFit fit = fit_equation(data, cs, basis, grid, pen, equation, opts,
                                have_warm ? &warm : nullptr);
    warm = fit.gamma;
    have_warm = true;
    const auto act = active_set(fit, G, opts.eps_zero, cs.n);
    const double b =
        bic(fit, data, basis, grid, T_eff, static_cast<int>(act.size()));
    res.bic_values.push_back(b);
    res.converged.push_back(fit.diagnostics.converged);
    // Ties broken toward larger lambda (sparser model): >= on an ascending grid.
    if (b <= best_bic) {
      best_bic = b;
      res.best_lambda = lambda;
      res.best_fit = std::move(fit);
      res.active_set = act;
    }
  }
  res.s1_hat = static_cast<int>(res.active_set.size());
  return res;
}

}  // namespace sqvar
