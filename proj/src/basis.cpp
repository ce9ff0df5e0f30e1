#include "sqvar/basis.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace sqvar {

namespace {

// Gauss-Legendre nodes/weights on [-1,1] by Newton iteration on P_n.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.resize(n);
  w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      const double z1 = z;
      z = z1 - p0 / pp;
      if (std::abs(z - z1) < 1e-15) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    w[n - 1 - i] = w[i];
  }
}

}  // namespace

SplineBasis::SplineBasis(int n_inner_knots, int degree, int quadrature_order)
    : degree_(degree), quad_order_(quadrature_order) {
  if (n_inner_knots < 0) throw std::invalid_argument("SplineBasis: n_inner_knots < 0");
  if (degree < 1) throw std::invalid_argument("SplineBasis: degree < 1");
  H_ = n_inner_knots + degree + 1;
  inner_knots_.resize(n_inner_knots);
  for (int k = 0; k < n_inner_knots; ++k) {
    inner_knots_(k) = static_cast<double>(k + 1) / (n_inner_knots + 1);
  }
  const int order = degree + 1;
  knots_.resize(2 * order + n_inner_knots);
  for (int i = 0; i < order; ++i) knots_(i) = 0.0;
  for (int k = 0; k < n_inner_knots; ++k) knots_(order + k) = inner_knots_(k);
  for (int i = 0; i < order; ++i) knots_(order + n_inner_knots + i) = 1.0;
}

Eigen::VectorXd SplineBasis::eval(double tau) const {
  if (!(tau > 0.0 && tau < 1.0)) {
    throw std::domain_error("SplineBasis::eval: tau must be in (0,1)");
  }
  const int order = degree_ + 1;
  const int n_b = H_;  // number of B-splines = inner + order

  // Knot span index: largest i with knots_[i] <= tau < knots_[i+1].
  int span = order - 1;
  while (span < n_b - 1 && tau >= knots_(span + 1)) ++span;

  // Cox-de Boor: nonzero B-splines B_{span-order+1..span} of this order.
  std::vector<double> Nvals(order, 0.0);
  Nvals[0] = 1.0;
  std::vector<double> left(order), right(order);
  for (int j = 1; j < order; ++j) {
    left[j] = tau - knots_(span + 1 - j);
    right[j] = knots_(span + j) - tau;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double tmp = Nvals[r] / (right[r + 1] + left[j - r]);
      Nvals[r] = saved + right[r + 1] * tmp;
      saved = left[j - r] * tmp;
    }
    Nvals[j] = saved;
  }

  Eigen::VectorXd B = Eigen::VectorXd::Zero(n_b);
  for (int j = 0; j < order; ++j) B(span - order + 1 + j) = Nvals[j];

  // Suffix sums: b_1 = 1, b_h = sum_{m >= h-1} B_m.
  Eigen::VectorXd out(H_);
  double acc = 0.0;
  for (int m = n_b - 1; m >= 1; --m) {
    acc += B(m);
    out(m) = acc;
  }
  out(0) = 1.0;
  return out;
}

Eigen::MatrixXd SplineBasis::eval_rows(const Eigen::VectorXd& taus) const {
  Eigen::MatrixXd out(taus.size(), H_);
  for (Eigen::Index l = 0; l < taus.size(); ++l) {
    out.row(l) = eval(taus(l)).transpose();
  }
  return out;
}

GramMatrix gram(const SplineBasis& basis) {
  const int H = basis.H();
  std::vector<double> gx, gw;
  gauss_legendre(basis.quadrature_order(), gx, gw);

  std::vector<double> breaks;
  breaks.push_back(0.0);
  for (Eigen::Index k = 0; k < basis.inner_knots().size(); ++k) {
    breaks.push_back(basis.inner_knots()(k));
  }
  breaks.push_back(1.0);

  GramMatrix gm;
  gm.G = Eigen::MatrixXd::Zero(H, H);
  for (std::size_t s = 0; s + 1 < breaks.size(); ++s) {
    const double a = breaks[s], b = breaks[s + 1];
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    for (std::size_t q = 0; q < gx.size(); ++q) {
      const Eigen::VectorXd bv = basis.eval(mid + half * gx[q]);
      gm.G.noalias() += (half * gw[q]) * bv * bv.transpose();
    }
  }
  // Symmetrize round-off, then factor with a tiny ridge for the solver's
  // metric transform; G itself stays as computed.
  gm.G = 0.5 * (gm.G + gm.G.transpose()).eval();
  Eigen::LLT<Eigen::MatrixXd> llt(gm.G +
                                  1e-12 * Eigen::MatrixXd::Identity(H, H));
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("gram: Cholesky factorization failed");
  }
  gm.chol = llt.matrixL();
  return gm;
}

double func_norm(const GramMatrix& G, const Eigen::VectorXd& delta) {
  if (delta.size() != G.G.rows()) {
    throw std::invalid_argument("func_norm: dimension mismatch");
  }
  const double q = delta.dot(G.G * delta);
  return std::sqrt(std::max(0.0, q));
}

}  // namespace sqvar
