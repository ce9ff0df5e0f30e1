#pragma once

#include <Eigen/Dense>
#include <set>

#include "sqvar/panel.hpp"

namespace sqvar {

// Max-min barycentric coordinate system on the simplex spanned by
// v_0 = (1, lb_1, ..., lb_n, ..., lb_1, ..., lb_n) and the vertices obtained
// by moving one lagged coordinate to lb_l + N * Delta_l.
struct CoordinateSystem {
  SeriesBounds bounds;
  int n = 0;
  int p = 0;

  int N() const { return n * p; }
  double delta(int l) const { return bounds.ub(l) - bounds.lb(l); }
  // Series index (0-based) behind design column k (1..N).
  int series_of(int k) const { return (k - 1) % n; }

  static CoordinateSystem create(const SeriesBounds& bounds, int p);
};

struct BarycentricRow {
  double c0 = 0.0;
  Eigen::VectorXd c;  // length N, lag-block order
  bool in_bounds = true;

  Eigen::VectorXd full() const {
    Eigen::VectorXd out(c.size() + 1);
    out(0) = c0;
    out.tail(c.size()) = c;
    return out;
  }
};

// Coordinates of a design row w = (1, lagged values). Out-of-bounds values
// yield negative coordinates and in_bounds=false; they are not rejected so
// that forecast recursions can leave the simplex.
BarycentricRow barycentric(const CoordinateSystem& cs,
                           const Eigen::VectorXd& w);

// All rows of a lagged design at once; rows of the result are (c0, c).
Eigen::MatrixXd barycentric_rows(const CoordinateSystem& cs,
                                 const Eigen::MatrixXd& design_rows,
                                 int* n_out_of_bounds = nullptr);

// phi_0 = theta_0 + sum lb_l theta_l^(j); phi_l^(j) = N Delta_l theta_l^(j) + phi_0.
void qvar_to_sqvar(const CoordinateSystem& cs, double theta0,
                   const Eigen::VectorXd& theta, double& phi0,
                   Eigen::VectorXd& phi);

// Inverse map; entries outside `active` map to theta = 0.
void sqvar_to_qvar(const CoordinateSystem& cs, double phi0,
                   const Eigen::VectorXd& phi, const std::set<int>& active,
                   double& theta0, Eigen::VectorXd& theta);

}  // namespace sqvar
