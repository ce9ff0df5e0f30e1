#pragma once

#include <Eigen/Dense>

namespace sqvar {

// Monotone I-spline basis on [0,1] with a leading constant element.
// Built as suffix sums of a clamped B-spline basis: b_1 = sum of all
// B-splines = 1, and b_{h} = sum_{m >= h-1} B_m for h >= 2, which is
// nondecreasing with b_h(0) = 0 and b_h(1) = 1.
class SplineBasis {
 public:
  // H = n_inner_knots + degree + 1 (constant included). Inner knots are
  // equally spaced in (0,1).
  SplineBasis(int n_inner_knots, int degree = 3, int quadrature_order = 16);

  int H() const { return H_; }
  int degree() const { return degree_; }
  const Eigen::VectorXd& inner_knots() const { return inner_knots_; }
  int quadrature_order() const { return quad_order_; }

  // Basis vector at tau in (0,1); first entry is 1.
  Eigen::VectorXd eval(double tau) const;
  // Rows are eval(taus[l]).
  Eigen::MatrixXd eval_rows(const Eigen::VectorXd& taus) const;

 private:
  int H_;
  int degree_;
  int quad_order_;
  Eigen::VectorXd inner_knots_;
  Eigen::VectorXd knots_;  // clamped knot vector
};

struct GramMatrix {
  Eigen::MatrixXd G;
  Eigen::MatrixXd chol;  // lower factor L with G = L L^T, used by func_norm
};

// Exact Gram integral of the basis by Gauss-Legendre quadrature per knot
// interval (exact for polynomial products at the default order).
GramMatrix gram(const SplineBasis& basis);

// sqrt(delta^T G delta), clamped at zero against round-off.
double func_norm(const GramMatrix& G, const Eigen::VectorXd& delta);

}  // namespace sqvar
