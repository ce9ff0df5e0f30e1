#pragma once

#include <Eigen/Dense>
#include <optional>

#include "sqvar/basis.hpp"
#include "sqvar/panel.hpp"
#include "sqvar/simplex.hpp"

namespace sqvar {

// tau_l = l / (1 + L), l = 1..L.
struct QuantileGrid {
  int L = 0;
  Eigen::VectorXd taus;

  static QuantileGrid make(int L);
};

struct ScadPenalty {
  double lambda = 0.0;
  double a = 3.7;
};

// rho_tau(u) = u * (tau - 1{u <= 0}).
double check_loss(double u, double tau);

// Three-branch SCAD penalty s_lambda(x) for x >= 0.
double scad(double x, const ScadPenalty& pen);
// Right derivative s_lambda'(x); lambda at 0, 0 beyond a*lambda.
double scad_deriv(double x, const ScadPenalty& pen);

struct SolverOptions {
  double tol = 1e-7;
  int max_iter = 5000;   // inner proximal-gradient iterations per LLA pass
  int max_outer = 25;    // LLA passes
  double eps_zero = 1e-6;
  bool verbose = false;
};

struct FitDiagnostics {
  int outer_iterations = 0;
  int inner_iterations = 0;
  double final_step_norm = 0.0;
  int boundary_warnings = 0;  // rows with negative barycentric coordinates
  bool converged = true;
  bool underdetermined = false;  // T - p < H * (N + 1)
};

struct SqvarFit {
  Eigen::MatrixXd gamma;  // (N+1) x H; row 0 = gamma_0, rows 1..N in design order
  double lambda_used = 0.0;
  int equation_index = 0;
  double objective_value = 0.0;
  FitDiagnostics diagnostics;

  // b_H(tau)^T gamma_k for every row: the fitted Phi vector at tau.
  Eigen::VectorXd phi_at(const SplineBasis& basis, double tau) const {
    return gamma * basis.eval(tau);
  }
};

// Per-equation training data: barycentric rows and the response.
struct EquationData {
  Eigen::MatrixXd C;   // Teff x (N+1)
  Eigen::VectorXd y;   // Teff
  int n_out_of_bounds = 0;
};

EquationData make_equation_data(const LaggedDesign& design,
                                const CoordinateSystem& cs, int equation);

// Full penalized objective (1/(L Teff)) sum check loss + group-SCAD penalty.
double objective(const Eigen::MatrixXd& gamma, const EquationData& data,
                 const SplineBasis& basis, const QuantileGrid& grid,
                 const ScadPenalty& pen, const GramMatrix& G);

// LLA + cone-projected proximal gradient on a Huber-smoothed check loss.
SqvarFit fit_equation(const EquationData& data, const CoordinateSystem& cs,
                      const SplineBasis& basis, const QuantileGrid& grid,
                      const ScadPenalty& pen, int equation,
                      const SolverOptions& opts = {},
                      const Eigen::MatrixXd* warm_start = nullptr);

// Unconstrained pointwise linear quantile regression of y on rows of W,
// solved on the same smoothed loss. Baseline comparator for crossing counts.
Eigen::VectorXd linear_qr(const Eigen::MatrixXd& W, const Eigen::VectorXd& y,
                          double tau, int max_iter = 4000, double tol = 1e-9,
                          const Eigen::VectorXd* warm = nullptr);

}  // namespace sqvar
