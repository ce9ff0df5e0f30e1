#include "sqvar/simplex.hpp"

#include <stdexcept>

namespace sqvar {

CoordinateSystem CoordinateSystem::create(const SeriesBounds& bounds, int p) {
  if (p < 1) throw std::invalid_argument("CoordinateSystem: p must be >= 1");
  CoordinateSystem cs;
  cs.bounds = bounds;
  cs.n = static_cast<int>(bounds.lb.size());
  cs.p = p;
  for (int l = 0; l < cs.n; ++l) {
    if (!(bounds.lb(l) < bounds.ub(l))) {
      throw std::invalid_argument("CoordinateSystem: lb must be < ub for series " +
                                  std::to_string(l + 1));
    }
  }
  return cs;
}

BarycentricRow barycentric(const CoordinateSystem& cs, const Eigen::VectorXd& w) {
  const int N = cs.N();
  if (w.size() != N + 1 || w(0) != 1.0) {
    throw std::invalid_argument("barycentric: design row must be (1, lags) of width N+1");
  }
  BarycentricRow row;
  row.c.resize(N);
  double sum = 0.0;
  for (int k = 1; k <= N; ++k) {
    const int l = cs.series_of(k);
    const double c = (w(k) - cs.bounds.lb(l)) / (N * cs.delta(l));
    row.c(k - 1) = c;
    sum += c;
    if (c < 0.0 || w(k) > cs.bounds.ub(l)) row.in_bounds = false;
  }
  row.c0 = 1.0 - sum;
  if (row.c0 < 0.0) row.in_bounds = false;
  return row;
}

Eigen::MatrixXd barycentric_rows(const CoordinateSystem& cs,
                                 const Eigen::MatrixXd& design_rows,
                                 int* n_out_of_bounds) {
  const int N = cs.N();
  Eigen::MatrixXd C(design_rows.rows(), N + 1);
  int bad = 0;
  for (Eigen::Index r = 0; r < design_rows.rows(); ++r) {
    const BarycentricRow row = barycentric(cs, design_rows.row(r).transpose());
    C(r, 0) = row.c0;
    C.row(r).tail(N) = row.c.transpose();
    if (!row.in_bounds) ++bad;
  }
  if (n_out_of_bounds) *n_out_of_bounds = bad;
  return C;
}

void qvar_to_sqvar(const CoordinateSystem& cs, double theta0,
                   const Eigen::VectorXd& theta, double& phi0,
                   Eigen::VectorXd& phi) {
  const int N = cs.N();
  if (theta.size() != N) throw std::invalid_argument("qvar_to_sqvar: theta size");
  phi0 = theta0;
  for (int k = 1; k <= N; ++k) phi0 += cs.bounds.lb(cs.series_of(k)) * theta(k - 1);
  phi.resize(N);
  for (int k = 1; k <= N; ++k) {
    phi(k - 1) = N * cs.delta(cs.series_of(k)) * theta(k - 1) + phi0;
  }
}

void sqvar_to_qvar(const CoordinateSystem& cs, double phi0,
                   const Eigen::VectorXd& phi, const std::set<int>& active,
                   double& theta0, Eigen::VectorXd& theta) {
  const int N = cs.N();
  if (phi.size() != N) throw std::invalid_argument("sqvar_to_qvar: phi size");
  theta.setZero(N);
  theta0 = phi0;
  for (int k : active) {
    if (k < 1 || k > N) throw std::invalid_argument("sqvar_to_qvar: active index");
    const int l = cs.series_of(k);
    theta(k - 1) = (phi(k - 1) - phi0) / (N * cs.delta(l));
    theta0 -= cs.bounds.lb(l) * theta(k - 1);
  }
}

}  // namespace sqvar
