#pragma once

#include <set>
#include <utility>
#include <vector>

#include "sqvar/solver.hpp"

namespace sqvar {

// (l, j) pairs with 0-based series l in [0,n) and 1-based lag j in [1,p].
using LagPair = std::pair<int, int>;

struct SelectionResult {
  std::vector<double> lambda_grid;
  std::vector<double> bic_values;
  std::vector<bool> converged;
  double best_lambda = 0.0;
  SqvarFit best_fit;
  std::set<LagPair> active_set;
  int s1_hat = 0;
};

// ln(mean check loss) + s1 * H * ln(Teff) / (2 Teff). Returns -inf when the
// fit interpolates (zero loss).
double bic(const SqvarFit& fit, const EquationData& data, const SplineBasis& basis,
           const QuantileGrid& grid, int T_eff, int s1_hat);

// lambda_k = c_k * ln(T) / sqrt(T), ascending.
std::vector<double> default_lambda_grid(int T, const std::vector<double>& c_values);

std::set<LagPair> active_set(const SqvarFit& fit, const GramMatrix& G,
                             double eps_zero, int n);

// Fits along the lambda grid (warm started small to large), scores each fit
// by BIC and keeps the winner; ties go to the larger lambda.
SelectionResult select_lambda(const EquationData& data, const CoordinateSystem& cs,
                              const SplineBasis& basis, const QuantileGrid& grid,
                              int equation, const std::vector<double>& lambda_grid,
                              const SolverOptions& opts = {}, double scad_a = 3.7);

}  // namespace sqvar
