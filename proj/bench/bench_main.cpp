// Timing comparison between the OpenMP-parallel kernels and plain serial
// loops over the same primitives, with a bitwise agreement check. Run with
// OMP_NUM_THREADS to vary the pool.

#include <chrono>
#include <cstdio>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "sqvar/dgp.hpp"
#include "sqvar/irf.hpp"
#include "sqvar/rng.hpp"

using namespace sqvar;
using clock_type = std::chrono::steady_clock;

namespace {

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

// Serial mirror of recover_ranks.
RankMatrix recover_ranks_serial(const std::vector<SqvarFit>& fits,
                                const SplineBasis& basis,
                                const Eigen::MatrixXd& C,
                                const Eigen::MatrixXd& responses) {
  RankMatrix out;
  const int n = static_cast<int>(fits.size());
  out.u_hat.resize(n, C.rows());
  for (Eigen::Index t = 0; t < C.rows(); ++t) {
    for (int i = 0; i < n; ++i) {
      bool cl = false;
      out.u_hat(i, t) =
          recover_rank(fits[i], basis, C.row(t).transpose(), responses(t, i), &cl);
      if (cl) ++out.n_clamped;
    }
  }
  return out;
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("OpenMP pool: %d thread(s)\n", omp_get_max_threads());
#else
  std::printf("built without OpenMP\n");
#endif

  // shared fixture: a fitted-looking system on simulated data
  CoefficientFunctions coefs;
  CopulaModel copula;
  study1_dgp(1, coefs, copula);
  auto panel = simulate_qvar(coefs, copula, 2000, 500, 42);
  auto cs = CoordinateSystem::create(compute_bounds(panel), 2);
  auto design = build_lagged_design(panel, 2);
  SplineBasis basis(1);

  std::vector<SqvarFit> fits;
  Rng rng(43, 0);
  for (int i = 0; i < 3; ++i) {
    SqvarFit f;
    f.gamma.resize(cs.N() + 1, basis.H());
    for (int k = 0; k <= cs.N(); ++k) {
      f.gamma(k, 0) = panel.values.col(i).minCoeff();
      for (int h = 1; h < basis.H(); ++h)
        f.gamma(k, h) = cs.delta(i) / (basis.H() - 1) * (0.5 + 0.5 * rng.uniform());
    }
    fits.push_back(f);
  }
  auto data = make_equation_data(design, cs, 0);

  // 1. rank recovery over the whole panel
  auto t0 = clock_type::now();
  auto par = recover_ranks(fits, basis, data.C, design.responses);
  const double t_par = seconds_since(t0);
  t0 = clock_type::now();
  auto ser = recover_ranks_serial(fits, basis, data.C, design.responses);
  const double t_ser = seconds_since(t0);
  const bool same_ranks =
      (par.u_hat - ser.u_hat).cwiseAbs().maxCoeff() == 0.0 &&
      par.n_clamped == ser.n_clamped;
  std::printf("rank recovery   : parallel %.3fs | serial %.3fs | agree %s\n",
              t_par, t_ser, same_ranks ? "yes" : "NO");

  // 2. generalized IRF, parallel pool vs forced single thread
  CopulaModel cop;
  cop.n = 3;
  cop.kappa = 0.3;
  ImpulseSpec spec;
  spec.shocked_series = 0;
  spec.shock_quantile = 0.9;
  spec.horizon = 10;
  spec.n_sim = 3000;
  spec.seed = 44;
  spec.history.resize(2, 3);
  spec.history.row(0) = panel.values.row(panel.T() - 1);
  spec.history.row(1) = panel.values.row(panel.T() - 2);

  t0 = clock_type::now();
  auto irf_par = generalized_irf(fits, cs, basis, cop, spec);
  const double t_irf_par = seconds_since(t0);
#ifdef _OPENMP
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
#endif
  t0 = clock_type::now();
  auto irf_ser = generalized_irf(fits, cs, basis, cop, spec);
  const double t_irf_ser = seconds_since(t0);
#ifdef _OPENMP
  omp_set_num_threads(saved);
#endif
  const bool same_irf =
      (irf_par.value - irf_ser.value).cwiseAbs().maxCoeff() == 0.0 &&
      (irf_par.mc_se - irf_ser.mc_se).cwiseAbs().maxCoeff() == 0.0;
  std::printf("generalized IRF : parallel %.3fs | 1 thread %.3fs | agree %s\n",
              t_irf_par, t_irf_ser, same_irf ? "yes" : "NO");

  return (same_ranks && same_irf) ? 0 : 1;
}
