// Command-line front end: simulate / estimate / irf / scenario / screen /
// report. Every run writes its resolved configuration next to its outputs so
// results can be reproduced from the artifact directory alone.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "sqvar/dgp.hpp"
#include "sqvar/irf.hpp"
#include "sqvar/report.hpp"
#include "sqvar/screen.hpp"
#include "sqvar/select.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace sqvar;

namespace {

// IO/usage problems exit with 2, numerical failures with 1.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
}

void write_json(const fs::path& path, const json& j) {
  write_text(path, j.dump(2) + "\n");
}

TimeSeriesPanel load_panel(const std::string& path) {
  if (!fs::exists(path)) throw IoError("input file not found: " + path);
  return load_csv(path, true);
}

fs::path make_run_dir(const std::string& out) {
  fs::path dir(out);
  fs::create_directories(dir);
  fs::create_directories(dir / "fits");
  fs::create_directories(dir / "tables");
  return dir;
}

json gamma_to_json(const Eigen::MatrixXd& g) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < g.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < g.cols(); ++c) row.push_back(g(r, c));
    rows.push_back(row);
  }
  return rows;
}

Eigen::MatrixXd gamma_from_json(const json& rows) {
  const int R = static_cast<int>(rows.size());
  const int C = static_cast<int>(rows.at(0).size());
  Eigen::MatrixXd g(R, C);
  for (int r = 0; r < R; ++r)
    for (int c = 0; c < C; ++c) g(r, c) = rows.at(r).at(c).get<double>();
  return g;
}

struct Model {
  int n = 0, p = 0, knots = 1;
  SeriesBounds bounds;
  double kappa = 0.0;
  std::vector<SqvarFit> fits;
  std::vector<std::set<LagPair>> active;
};

Model load_model(const std::string& dir) {
  const fs::path path = fs::path(dir) / "model.json";
  std::ifstream in(path);
  if (!in) throw IoError("model file not found: " + path.string());
  json j;
  in >> j;
  Model m;
  m.n = j.at("n");
  m.p = j.at("p");
  m.knots = j.at("knots");
  m.kappa = j.at("kappa");
  m.bounds.lb.resize(m.n);
  m.bounds.ub.resize(m.n);
  for (int i = 0; i < m.n; ++i) {
    m.bounds.lb(i) = j.at("lb").at(i);
    m.bounds.ub(i) = j.at("ub").at(i);
  }
  for (const auto& je : j.at("equations")) {
    SqvarFit f;
    f.gamma = gamma_from_json(je.at("gamma"));
    f.lambda_used = je.at("lambda");
    m.fits.push_back(f);
    std::set<LagPair> act;
    for (const auto& pr : je.at("active"))
      act.insert(LagPair(pr.at(0).get<int>(), pr.at(1).get<int>()));
    m.active.push_back(act);
  }
  return m;
}

Eigen::MatrixXd history_from_panel(const TimeSeriesPanel& panel, int p) {
  if (panel.T() < p) throw IoError("need at least p rows of history");
  Eigen::MatrixXd state(p, panel.n());
  for (int j = 0; j < p; ++j) state.row(j) = panel.values.row(panel.T() - 1 - j);
  return state;
}

// ---- simulate ----

struct SimulateArgs {
  std::string dgp = "study1";
  int b = 1;
  int T = 600;
  int burn_in = 500;
  std::uint64_t seed = 1;
  std::string out = "panel.csv";
};

int cmd_simulate(const SimulateArgs& a) {
  if (a.T <= 0) throw IoError("--T must be positive");
  TimeSeriesPanel panel;
  if (a.dgp == "study1") {
    CoefficientFunctions coefs;
    CopulaModel copula;
    study1_dgp(a.b, coefs, copula);
    auto rep = check_stationarity(coefs);
    if (!rep.condition_met) {
      std::cerr << "note: sufficient stationarity condition not met (rho = "
                << rep.rho << "); proceeding\n";
    }
    panel = simulate_qvar(coefs, copula, a.T, a.burn_in, a.seed);
  } else if (a.dgp == "study2") {
    auto res = simulate_study2(a.T, a.seed);
    std::cerr << "bounds stabilized after " << res.steps_to_stabilize
              << " steps\n";
    panel = res.panel;
  } else {
    throw IoError("unknown --dgp (use study1 or study2)");
  }
  write_csv(panel, a.out);
  std::cout << "wrote " << panel.T() << " x " << panel.n() << " panel to "
            << a.out << "\n";
  return 0;
}

// ---- estimate ----

struct EstimateArgs {
  std::string input;
  std::string out = "run";
  int p = 2;
  int knots = 1;
  int L = 30;
  std::vector<double> c_lambda = {0.5, 1.0, 1.5, 2.0, 2.5, 3.0};
  std::vector<double> lambda;  // explicit grid overrides c_lambda
  int tau_points = 99;
  double bounds_margin = 0.0;
};

int cmd_estimate(const EstimateArgs& a) {
  auto panel = load_panel(a.input);
  const fs::path dir = make_run_dir(a.out);
  write_json(dir / "config.json",
             json{{"command", "estimate"},
                  {"input", a.input},
                  {"p", a.p},
                  {"knots", a.knots},
                  {"L", a.L},
                  {"c_lambda", a.c_lambda},
                  {"lambda", a.lambda},
                  {"tau_points", a.tau_points},
                  {"bounds_margin", a.bounds_margin}});

  auto bounds = compute_bounds(panel, a.bounds_margin);
  auto cs = CoordinateSystem::create(bounds, a.p);
  auto design = build_lagged_design(panel, a.p);
  SplineBasis basis(a.knots);
  auto G = gram(basis);
  auto grid = QuantileGrid::make(a.L);
  const std::vector<double> lambdas =
      a.lambda.empty() ? default_lambda_grid(panel.T(), a.c_lambda) : a.lambda;

  auto taus = interior_tau_grid(a.tau_points);
  json model{{"n", panel.n()}, {"p", a.p}, {"knots", a.knots}};
  model["lb"] = json::array();
  model["ub"] = json::array();
  for (int i = 0; i < panel.n(); ++i) {
    model["lb"].push_back(bounds.lb(i));
    model["ub"].push_back(bounds.ub(i));
  }
  model["equations"] = json::array();

  std::vector<SqvarFit> fits;
  double total_crossing = 0.0;
  for (int eq = 0; eq < panel.n(); ++eq) {
    auto data = make_equation_data(design, cs, eq);
    SelectionResult sel;
    if (lambdas.size() == 1 && lambdas[0] == 0.0) {
      sel.best_fit = fit_equation(data, cs, basis, grid, ScadPenalty{0.0}, eq);
      sel.best_lambda = 0.0;
      sel.active_set = active_set(sel.best_fit, G, 1e-6, panel.n());
      sel.lambda_grid = {0.0};
    } else {
      sel = select_lambda(data, cs, basis, grid, eq, lambdas);
    }
    fits.push_back(sel.best_fit);

    json je{{"equation", eq},
            {"lambda", sel.best_lambda},
            {"lambda_grid", sel.lambda_grid},
            {"bic", sel.bic_values},
            {"gamma", gamma_to_json(sel.best_fit.gamma)}};
    je["active"] = json::array();
    for (const auto& [l, j] : sel.active_set) je["active"].push_back({l, j});
    write_json(dir / "fits" / ("eq" + std::to_string(eq) + ".json"), je);
    model["equations"].push_back(je);

    // coefficient curves on the evaluation grid
    auto curves = theta_curves(sel.best_fit, cs, basis, taus,
                               design_columns(sel.active_set, panel.n()));
    std::string csv = "tau,theta0";
    for (int k = 1; k <= cs.N(); ++k) csv += ",theta" + std::to_string(k);
    csv += "\n";
    for (int t = 0; t < taus.size(); ++t) {
      csv += std::to_string(taus(t));
      for (int r = 0; r <= cs.N(); ++r) csv += "," + std::to_string(curves(r, t));
      csv += "\n";
    }
    write_text(dir / "tables" / ("coefficients_eq" + std::to_string(eq) + ".csv"),
               csv);
    total_crossing += crossing_frequency(quantile_curves(sel.best_fit, data, basis));
  }

  // innovation dependence across equations
  double kappa = 0.0;
  if (panel.n() >= 2) {
    auto data0 = make_equation_data(design, cs, 0);
    auto ranks = recover_ranks(fits, basis, data0.C, design.responses);
    kappa = fit_gaussian_copula(ranks).kappa;
  }
  model["kappa"] = kappa;
  write_json(dir / "model.json", model);
  write_text(dir / "tables" / "crossing.csv",
             "avg_crossing_per_t\n" + std::to_string(total_crossing / panel.n()) +
                 "\n");
  std::cout << "estimated " << panel.n() << " equations; avg crossing "
            << total_crossing / panel.n() << "; kappa " << kappa << "\n";
  return 0;
}

// ---- irf ----

struct IrfArgs {
  std::string model_dir;
  std::string input;
  std::string out = "irf.csv";
  int shocked_series = 0;
  double shock_quantile = 0.9;
  int horizon = 10;
  int n_sim = 2000;
  std::uint64_t seed = 1;
};

int cmd_irf(const IrfArgs& a) {
  auto m = load_model(a.model_dir);
  auto panel = load_panel(a.input);
  auto cs = CoordinateSystem::create(m.bounds, m.p);
  SplineBasis basis(m.knots);
  CopulaModel cop;
  cop.n = m.n;
  cop.kappa = m.kappa;

  ImpulseSpec spec;
  spec.shocked_series = a.shocked_series;
  spec.shock_quantile = a.shock_quantile;
  spec.horizon = a.horizon;
  spec.n_sim = a.n_sim;
  spec.seed = a.seed;
  spec.history = history_from_panel(panel, m.p);
  auto res = generalized_irf(m.fits, cs, basis, cop, spec);

  std::string csv = "horizon,series,value,mc_se\n";
  for (int s = 0; s <= a.horizon; ++s)
    for (int i = 0; i < m.n; ++i)
      csv += std::to_string(s) + "," + std::to_string(i) + "," +
             std::to_string(res.value(i, s)) + "," +
             std::to_string(res.mc_se(i, s)) + "\n";
  write_text(a.out, csv);
  if (res.out_of_bounds_steps > 0) {
    std::cerr << "note: " << res.out_of_bounds_steps
              << " simulated steps left the estimation simplex\n";
  }
  std::cout << "wrote " << a.out << "\n";
  return 0;
}

// ---- scenario ----

struct ScenarioArgs {
  std::string model_dir;
  std::string input;
  std::string path_a;
  std::string path_b;
  std::string out = "scenario_irf.csv";
};

int cmd_scenario(const ScenarioArgs& a) {
  auto m = load_model(a.model_dir);
  auto panel = load_panel(a.input);
  auto cs = CoordinateSystem::create(m.bounds, m.p);
  SplineBasis basis(m.knots);
  const auto state = history_from_panel(panel, m.p);

  auto read_path = [&](const std::string& file) {
    auto tp = load_panel(file);  // rows = horizon steps, cols = series
    if (tp.n() != m.n) throw IoError("scenario file has wrong series count");
    Scenario sc;
    sc.tau_path = tp.values.transpose();
    return sc;
  };
  auto pa = scenario_forecast(m.fits, cs, basis, read_path(a.path_a), state);
  auto pb = scenario_forecast(m.fits, cs, basis, read_path(a.path_b), state);
  auto diff = scenario_irf(pa, pb);

  std::string csv = "horizon,series,path_a,path_b,difference\n";
  for (int s = 0; s < diff.cols(); ++s)
    for (int i = 0; i < m.n; ++i)
      csv += std::to_string(s) + "," + std::to_string(i) + "," +
             std::to_string(pa(i, s)) + "," + std::to_string(pb(i, s)) + "," +
             std::to_string(diff(i, s)) + "\n";
  write_text(a.out, csv);
  std::cout << "wrote " << a.out << "\n";
  return 0;
}

// ---- screen ----

struct ScreenArgs {
  std::string input;
  std::string out = "screen.csv";
  int target = 0;
  int p = 1;
  double nu = 0.0;
  int top_k = 0;
  std::vector<double> tau_grid = {0.1, 0.25, 0.5, 0.75, 0.9};
};

int cmd_screen(const ScreenArgs& a) {
  auto panel = load_panel(a.input);
  if (a.target < 0 || a.target >= panel.n())
    throw IoError("--target out of range");
  ScreenConfig cfg;
  cfg.p = a.p;
  cfg.nu_T = a.nu;
  cfg.top_k = a.top_k;
  cfg.tau_grid = a.tau_grid;
  auto res = screen(panel, cfg, a.target);

  std::string csv = "m_series,m_lag,tau,statistic,selected\n";
  for (const auto& e : res.entries)
    for (std::size_t k = 0; k < cfg.tau_grid.size(); ++k)
      csv += std::to_string(e.series) + "," + std::to_string(e.lag) + "," +
             std::to_string(cfg.tau_grid[k]) + "," +
             std::to_string(e.statistics[k]) + "," +
             (e.selected ? "1" : "0") + "\n";
  write_text(a.out, csv);
  std::cout << res.selected.size() << " of " << res.entries.size()
            << " predictors kept; wrote " << a.out << "\n";
  return 0;
}

// ---- report ----

struct ReportArgs {
  std::string manifest;
  std::string out = "report";
};

// Manifest: {"runs": [dir, ...], "truth_curves": csv, "truth_active": [[l,j]]}
// truth_curves rows must match the estimate tau grid; first column is tau.
int cmd_report(const ReportArgs& a) {
  std::ifstream in(a.manifest);
  if (!in) throw IoError("manifest not found: " + a.manifest);
  json man;
  in >> man;
  const fs::path dir(a.out);
  fs::create_directories(dir);

  // truth table
  auto truth_panel = load_panel(man.at("truth_curves"));
  const int K = truth_panel.T();
  Eigen::MatrixXd truth = truth_panel.values.rightCols(truth_panel.n() - 1).transpose();
  std::set<LagPair> truth_active;
  for (const auto& pr : man.at("truth_active"))
    truth_active.insert(LagPair(pr.at(0).get<int>(), pr.at(1).get<int>()));

  RmseAccumulator acc(K);
  SelectionTally tally;
  double crossing = 0.0;
  int runs = 0;
  for (const auto& run : man.at("runs")) {
    const fs::path rd(run.get<std::string>());
    auto curves_panel = load_panel((rd / "tables" / "coefficients_eq0.csv").string());
    if (curves_panel.T() != K)
      throw IoError("tau grid mismatch between run and truth table");
    Eigen::MatrixXd hat =
        curves_panel.values.rightCols(curves_panel.n() - 1).transpose();
    acc.add(hat, truth);

    std::ifstream fin((rd / "fits" / "eq0.json").string());
    if (!fin) throw IoError("missing fit artifact in " + rd.string());
    json jf;
    fin >> jf;
    std::set<LagPair> act;
    for (const auto& pr : jf.at("active"))
      act.insert(LagPair(pr.at(0).get<int>(), pr.at(1).get<int>()));
    tally.add(act, truth_active);

    auto cr = load_panel((rd / "tables" / "crossing.csv").string());
    crossing += cr.values(0, 0);
    ++runs;
  }

  auto rmse_tau = acc.rmse_tau();
  std::string csv = "tau,rmse\n";
  for (int k = 0; k < K; ++k)
    csv += std::to_string(truth_panel.values(k, 0)) + "," +
           std::to_string(rmse_tau(k)) + "\n";
  write_text(dir / "rmse.csv", csv);
  write_json(dir / "summary.json",
             json{{"replications", runs},
                  {"rmse_all", acc.rmse_all()},
                  {"avg_crossing", runs ? crossing / runs : 0.0},
                  {"exact_rate", tally.exact_rate()},
                  {"superset_rate", tally.superset_rate()}});
  std::cout << "rmse_all " << acc.rmse_all() << " over " << runs
            << " replications\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Non-crossing quantile vector autoregression toolkit"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML config file; flags override");
  int threads = 0;
  app.add_option("--threads", threads, "cap the OpenMP worker pool");

  SimulateArgs sim;
  auto* s_sim = app.add_subcommand("simulate", "generate a synthetic panel CSV");
  s_sim->add_option("--dgp", sim.dgp, "study1 or study2");
  s_sim->add_option("--b", sim.b, "identification strength (study1)");
  s_sim->add_option("--T", sim.T, "sample size");
  s_sim->add_option("--burn-in", sim.burn_in, "burn-in length (study1)");
  s_sim->add_option("--seed", sim.seed, "RNG seed");
  s_sim->add_option("--out", sim.out, "output CSV path");

  EstimateArgs est;
  auto* s_est = app.add_subcommand("estimate", "penalized estimation with BIC selection");
  s_est->add_option("--input", est.input, "panel CSV")->required();
  s_est->add_option("--out", est.out, "run directory");
  s_est->add_option("--p", est.p, "lag order");
  s_est->add_option("--knots", est.knots, "interior spline knots");
  s_est->add_option("--L", est.L, "estimation quantile grid size");
  s_est->add_option("--c-lambda", est.c_lambda, "penalty scale grid");
  s_est->add_option("--lambda", est.lambda, "explicit lambda grid (overrides --c-lambda)");
  s_est->add_option("--tau-points", est.tau_points, "coefficient evaluation grid size");
  s_est->add_option("--bounds-margin", est.bounds_margin, "relative widening of empirical bounds");

  IrfArgs irf;
  auto* s_irf = app.add_subcommand("irf", "Monte-Carlo generalized impulse response");
  s_irf->add_option("--model", irf.model_dir, "estimate run directory")->required();
  s_irf->add_option("--input", irf.input, "panel CSV supplying the history")->required();
  s_irf->add_option("--out", irf.out, "output CSV");
  s_irf->add_option("--series", irf.shocked_series, "shocked series (0-based)");
  s_irf->add_option("--quantile", irf.shock_quantile, "shock quantile in (0,1)");
  s_irf->add_option("--horizon", irf.horizon, "forecast horizon");
  s_irf->add_option("--n-sim", irf.n_sim, "simulation paths");
  s_irf->add_option("--seed", irf.seed, "RNG seed");

  ScenarioArgs sce;
  auto* s_sce = app.add_subcommand("scenario", "deterministic rank-path forecast difference");
  s_sce->add_option("--model", sce.model_dir, "estimate run directory")->required();
  s_sce->add_option("--input", sce.input, "panel CSV supplying the history")->required();
  s_sce->add_option("--path-a", sce.path_a, "rank path CSV (rows = steps)")->required();
  s_sce->add_option("--path-b", sce.path_b, "rank path CSV")->required();
  s_sce->add_option("--out", sce.out, "output CSV");

  ScreenArgs scr;
  auto* s_scr = app.add_subcommand("screen", "quantile-adaptive predictor screening");
  s_scr->add_option("--input", scr.input, "panel CSV")->required();
  s_scr->add_option("--target", scr.target, "target series (0-based)");
  s_scr->add_option("--p", scr.p, "max lag");
  s_scr->add_option("--nu", scr.nu, "retention threshold");
  s_scr->add_option("--top-k", scr.top_k, "keep the k largest statistics instead");
  s_scr->add_option("--tau-grid", scr.tau_grid, "screening quantile grid");
  s_scr->add_option("--out", scr.out, "output CSV");

  ReportArgs rep;
  auto* s_rep = app.add_subcommand("report", "aggregate a Monte-Carlo manifest");
  s_rep->add_option("--manifest", rep.manifest, "experiment manifest JSON")->required();
  s_rep->add_option("--out", rep.out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#endif

  try {
    if (*s_sim) return cmd_simulate(sim);
    if (*s_est) return cmd_estimate(est);
    if (*s_irf) return cmd_irf(irf);
    if (*s_sce) return cmd_scenario(sce);
    if (*s_scr) return cmd_screen(scr);
    if (*s_rep) return cmd_report(rep);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
