#include "sqvar/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sqvar {

QuantileGrid QuantileGrid::make(int L) {
  if (L < 1) throw std::invalid_argument("QuantileGrid: L must be >= 1");
  QuantileGrid g;
  g.L = L;
  g.taus.resize(L);
  for (int l = 1; l <= L; ++l) g.taus(l - 1) = static_cast<double>(l) / (1 + L);
  return g;
}

double check_loss(double u, double tau) {
  return u * (tau - (u <= 0.0 ? 1.0 : 0.0));
}

double scad(double x, const ScadPenalty& pen) {
  if (x < 0.0) throw std::invalid_argument("scad: x must be >= 0");
  const double l = pen.lambda, a = pen.a;
  if (x <= l) return l * x;
  if (x <= a * l) return -(x * x - 2.0 * a * l * x + l * l) / (2.0 * (a - 1.0));
  return (a + 1.0) * l * l / 2.0;
}

double scad_deriv(double x, const ScadPenalty& pen) {
  if (x < 0.0) throw std::invalid_argument("scad_deriv: x must be >= 0");
  const double l = pen.lambda, a = pen.a;
  if (x <= l) return l;
  if (x <= a * l) return (a * l - x) / (a - 1.0);
  return 0.0;
}

EquationData make_equation_data(const LaggedDesign& design,
                                const CoordinateSystem& cs, int equation) {
  EquationData d;
  d.C = barycentric_rows(cs, design.rows, &d.n_out_of_bounds);
  d.y = design.responses.col(equation);
  return d;
}

namespace {

// Moreau-smoothed check loss with width h and its derivative in the residual.
inline double rho_smooth(double u, double tau, double h) {
  if (u >= h * tau) return tau * u - 0.5 * h * tau * tau;
  if (u <= -h * (1.0 - tau)) return (tau - 1.0) * u - 0.5 * h * (1.0 - tau) * (1.0 - tau);
  return u * u / (2.0 * h);
}

inline double psi_smooth(double u, double tau, double h) {
  return std::clamp(u / h, tau - 1.0, tau);
}

void project_cone(Eigen::MatrixXd& gamma) {
  const Eigen::Index H = gamma.cols();
  for (Eigen::Index r = 0; r < gamma.rows(); ++r)
    for (Eigen::Index hcol = 1; hcol < H; ++hcol)
      gamma(r, hcol) = std::max(0.0, gamma(r, hcol));
}

struct Workspace {
  Eigen::MatrixXd B;   // L x H
  Eigen::MatrixXd P;   // Teff x L
  Eigen::MatrixXd Psi; // Teff x L
};

double smoothed_loss(const Eigen::MatrixXd& gamma, const EquationData& data,
                     const QuantileGrid& grid, double h, Workspace& ws) {
  ws.P.noalias() = data.C * gamma * ws.B.transpose();
  double acc = 0.0;
  const Eigen::Index Teff = data.y.size();
  for (int l = 0; l < grid.L; ++l) {
    const double tau = grid.taus(l);
    for (Eigen::Index t = 0; t < Teff; ++t) {
      acc += rho_smooth(data.y(t) - ws.P(t, l), tau, h);
    }
  }
  return acc / (static_cast<double>(grid.L) * static_cast<double>(Teff));
}

// Gradient of smoothed_loss at the point where ws.P is current.
Eigen::MatrixXd smoothed_grad(const EquationData& data, const QuantileGrid& grid,
                              double h, Workspace& ws) {
  const Eigen::Index Teff = data.y.size();
  ws.Psi.resize(Teff, grid.L);
  for (int l = 0; l < grid.L; ++l) {
    const double tau = grid.taus(l);
    for (Eigen::Index t = 0; t < Teff; ++t) {
      ws.Psi(t, l) = psi_smooth(data.y(t) - ws.P(t, l), tau, h);
    }
  }
  const double scale = -1.0 / (static_cast<double>(grid.L) * static_cast<double>(Teff));
  return scale * (data.C.transpose() * ws.Psi * ws.B);
}

double group_norm(const GramMatrix& G, const Eigen::MatrixXd& gamma, int k) {
  const Eigen::VectorXd d = (gamma.row(k) - gamma.row(0)).transpose();
  return func_norm(G, d);
}

double surrogate_penalty(const Eigen::MatrixXd& gamma, const GramMatrix& G,
                         const Eigen::VectorXd& weights) {
  double acc = 0.0;
  for (int k = 1; k < gamma.rows(); ++k) {
    if (weights(k - 1) > 0.0) acc += weights(k - 1) * group_norm(G, gamma, k);
  }
  return acc;
}

// One proximal step: gradient move, group shrink of the differences in the
// G-metric, cone projection.
Eigen::MatrixXd prox_candidate(const Eigen::MatrixXd& gamma,
                               const Eigen::MatrixXd& grad, double eta,
                               const GramMatrix& G,
                               const Eigen::VectorXd& weights) {
  Eigen::MatrixXd cand = gamma - eta * grad;
  for (int k = 1; k < cand.rows(); ++k) {
    const double w = weights(k - 1);
    if (w <= 0.0) continue;
    Eigen::VectorXd d = (cand.row(k) - cand.row(0)).transpose();
    const double nu = func_norm(G, d);
    const double thr = eta * w;
    if (nu <= thr) {
      cand.row(k) = cand.row(0);
    } else {
      cand.row(k) = cand.row(0) + ((1.0 - thr / nu) * d).transpose();
    }
  }
  project_cone(cand);
  return cand;
}

// Cone-projected least squares of basis rows onto target values; used only
// for the collapsed warm start.
Eigen::VectorXd cone_ls(const Eigen::MatrixXd& B, const Eigen::VectorXd& q) {
  const Eigen::MatrixXd BtB = B.transpose() * B;
  const Eigen::VectorXd Btq = B.transpose() * q;
  const double lip = BtB.operatorNorm();
  Eigen::VectorXd g = Eigen::VectorXd::Zero(B.cols());
  g(0) = q.mean();
  const double eta = 1.0 / std::max(lip, 1e-12);
  for (int it = 0; it < 500; ++it) {
    const Eigen::VectorXd grad = BtB * g - Btq;
    Eigen::VectorXd next = g - eta * grad;
    for (Eigen::Index h = 1; h < next.size(); ++h) next(h) = std::max(0.0, next(h));
    if ((next - g).norm() < 1e-12 * (1.0 + g.norm())) {
      g = next;
      break;
    }
    g = next;
  }
  return g;
}

}  // namespace

double objective(const Eigen::MatrixXd& gamma, const EquationData& data,
                 const SplineBasis& basis, const QuantileGrid& grid,
                 const ScadPenalty& pen, const GramMatrix& G) {
  if (gamma.rows() != data.C.cols() || gamma.cols() != basis.H()) {
    throw std::invalid_argument("objective: shape mismatch");
  }
  const Eigen::MatrixXd B = basis.eval_rows(grid.taus);
  const Eigen::MatrixXd P = data.C * gamma * B.transpose();
  double acc = 0.0;
  const Eigen::Index Teff = data.y.size();
  for (int l = 0; l < grid.L; ++l) {
    for (Eigen::Index t = 0; t < Teff; ++t) {
      acc += check_loss(data.y(t) - P(t, l), grid.taus(l));
    }
  }
  acc /= static_cast<double>(grid.L) * static_cast<double>(Teff);
  for (int k = 1; k < gamma.rows(); ++k) {
    acc += scad(group_norm(G, gamma, k), pen);
  }
  return acc;
}

SqvarFit fit_equation(const EquationData& data, const CoordinateSystem& cs,
                      const SplineBasis& basis, const QuantileGrid& grid,
                      const ScadPenalty& pen, int equation,
                      const SolverOptions& opts,
                      const Eigen::MatrixXd* warm_start) {
  const int N1 = static_cast<int>(data.C.cols());
  const int H = basis.H();
  const Eigen::Index Teff = data.y.size();
  if (pen.lambda < 0.0) throw std::invalid_argument("fit_equation: lambda < 0");

  const GramMatrix G = gram(basis);
  Workspace ws;
  ws.B = basis.eval_rows(grid.taus);

  SqvarFit fit;
  fit.lambda_used = pen.lambda;
  fit.equation_index = equation;
  fit.diagnostics.boundary_warnings = data.n_out_of_bounds;
  fit.diagnostics.underdetermined = Teff < static_cast<Eigen::Index>(H) * N1;

  Eigen::MatrixXd gamma(N1, H);
  if (warm_start) {
    gamma = *warm_start;
    project_cone(gamma);
  } else {
    // Collapsed start: gamma_0 from the marginal empirical quantile curve,
    // every other row equal to it (penalty-free and feasible).
    Eigen::VectorXd ysorted = data.y;
    std::sort(ysorted.data(), ysorted.data() + ysorted.size());
    Eigen::VectorXd q(grid.L);
    for (int l = 0; l < grid.L; ++l) {
      const auto idx = static_cast<Eigen::Index>(
          std::ceil(grid.taus(l) * static_cast<double>(Teff)) - 1);
      q(l) = ysorted(std::clamp<Eigen::Index>(idx, 0, Teff - 1));
    }
    const Eigen::VectorXd g0 = cone_ls(ws.B, q);
    for (int k = 0; k < N1; ++k) gamma.row(k) = g0.transpose();
  }

  // Step-size seed from a crude Lipschitz bound of the smoothed gradient.
  double cmax2 = 0.0;
  for (Eigen::Index t = 0; t < Teff; ++t)
    cmax2 = std::max(cmax2, data.C.row(t).squaredNorm());
  double bmax2 = 0.0;
  for (int l = 0; l < grid.L; ++l) bmax2 = std::max(bmax2, ws.B.row(l).squaredNorm());

  const double smoothing[] = {1e-2, 1e-3, 1e-4, 1e-5};
  // Best-iterate tracking starts after the first pass: the initial point is
  // only a feasible seed, not a candidate solution.
  double best_obj = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd best_gamma = gamma;
  int total_inner = 0;
  double last_step_norm = 0.0;

  // LLA needs a good initial estimator: from the collapsed start the first
  // pass runs unpenalized, and only later passes apply tangent weights (from
  // a penalty-path warm start the current iterate is already informative).
  const bool unpenalized_first = (warm_start == nullptr);

  for (int outer = 0; outer < opts.max_outer; ++outer) {
    fit.diagnostics.outer_iterations = outer + 1;
    Eigen::VectorXd weights(N1 - 1);
    if (outer == 0 && unpenalized_first) {
      weights.setZero();
    } else {
      for (int k = 1; k < N1; ++k) {
        weights(k - 1) = scad_deriv(group_norm(G, gamma, k), pen);
      }
    }

    // Continuation ladder over the smoothing width.
    const int n_stages = (outer == 0) ? 4 : 2;
    for (int stage = 4 - n_stages; stage < 4; ++stage) {
      const double h = smoothing[stage];
      double eta = h / std::max(cmax2 * bmax2, 1e-12);
      double f_cur = smoothed_loss(gamma, data, grid, h, ws) +
                     surrogate_penalty(gamma, G, weights);
      const int stage_cap = std::max(50, opts.max_iter / 4);
      int flat = 0;
      for (int it = 0; it < stage_cap; ++it) {
        ++total_inner;
        smoothed_loss(gamma, data, grid, h, ws);  // refresh ws.P
        const Eigen::MatrixXd grad = smoothed_grad(data, grid, h, ws);
        bool accepted = false;
        for (int bt = 0; bt < 40; ++bt) {
          Eigen::MatrixXd cand = prox_candidate(gamma, grad, eta, G, weights);
          const double f_cand = smoothed_loss(cand, data, grid, h, ws) +
                                surrogate_penalty(cand, G, weights);
          if (f_cand <= f_cur + 1e-14 * (1.0 + std::abs(f_cur))) {
            last_step_norm = (cand - gamma).norm();
            const bool small_step =
                last_step_norm <= 1e-6 * (1.0 + gamma.norm());
            gamma = std::move(cand);
            if (f_cur - f_cand <= opts.tol * (1.0 + std::abs(f_cur)) &&
                small_step) {
              ++flat;
            } else {
              flat = 0;
            }
            f_cur = f_cand;
            eta *= 1.25;
            accepted = true;
            break;
          }
          eta *= 0.5;
        }
        if (!accepted || flat >= 2) break;
      }
    }

    const double obj = objective(gamma, data, basis, grid, pen, G);
    const double improve = best_obj - obj;
    if (obj < best_obj) {
      best_obj = obj;
      best_gamma = gamma;
    }
    if (outer > 0 && std::abs(improve) <= opts.tol * (1.0 + std::abs(best_obj))) {
      break;
    }
  }

  gamma = best_gamma;
  // Snap near-collapsed groups exactly onto gamma_0.
  for (int k = 1; k < N1; ++k) {
    if (group_norm(G, gamma, k) <= opts.eps_zero) gamma.row(k) = gamma.row(0);
  }

  fit.gamma = gamma;
  fit.objective_value = objective(gamma, data, basis, grid, pen, G);
  fit.diagnostics.inner_iterations = total_inner;
  fit.diagnostics.final_step_norm = last_step_norm;
  fit.diagnostics.converged =
      fit.diagnostics.outer_iterations < opts.max_outer || opts.max_outer == 1;
  (void)cs;
  return fit;
}

Eigen::VectorXd linear_qr(const Eigen::MatrixXd& W, const Eigen::VectorXd& y,
                          double tau, int max_iter, double tol,
                          const Eigen::VectorXd* warm) {
  const Eigen::Index T = y.size();
  Eigen::VectorXd beta = warm ? *warm : Eigen::VectorXd::Zero(W.cols());
  double wmax2 = 0.0;
  for (Eigen::Index t = 0; t < T; ++t) wmax2 = std::max(wmax2, W.row(t).squaredNorm());

  for (double h : {1e-2, 1e-4, 1e-6}) {
    double eta = h / std::max(wmax2, 1e-12);
    Eigen::VectorXd r = y - W * beta;
    auto loss = [&](const Eigen::VectorXd& res) {
      double acc = 0.0;
      for (Eigen::Index t = 0; t < T; ++t) acc += rho_smooth(res(t), tau, h);
      return acc / static_cast<double>(T);
    };
    double f_cur = loss(r);
    for (int it = 0; it < max_iter; ++it) {
      Eigen::VectorXd psi(T);
      for (Eigen::Index t = 0; t < T; ++t) psi(t) = psi_smooth(r(t), tau, h);
      const Eigen::VectorXd grad = -(W.transpose() * psi) / static_cast<double>(T);
      bool accepted = false;
      for (int bt = 0; bt < 40; ++bt) {
        const Eigen::VectorXd cand = beta - eta * grad;
        const Eigen::VectorXd rc = y - W * cand;
        const double f_cand = loss(rc);
        if (f_cand <= f_cur + 1e-15) {
          const bool done = f_cur - f_cand <= tol * (1.0 + std::abs(f_cur));
          beta = cand;
          r = rc;
          f_cur = f_cand;
          eta *= 1.25;
          accepted = true;
          if (done) it = max_iter;
          break;
        }
        eta *= 0.5;
      }
      if (!accepted) break;
    }
  }
  return beta;
}

}  // namespace sqvar
