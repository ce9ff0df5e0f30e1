#include "sqvar/panel.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sqvar {

namespace {

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_cell(const std::string& cell, int row, int col) {
  const char* b = cell.data();
  const char* e = b + cell.size();
  while (b < e && (*b == ' ' || *b == '\t' || *b == '\r')) ++b;
  while (e > b && (e[-1] == ' ' || e[-1] == '\t' || e[-1] == '\r')) --e;
  double v;
  auto [ptr, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || ptr != e) {
    throw std::runtime_error("load_csv: non-numeric cell \"" + cell +
                             "\" at row " + std::to_string(row + 1) +
                             ", column " + std::to_string(col + 1));
  }
  if (!std::isfinite(v)) {
    throw std::runtime_error("load_csv: non-finite value at row " +
                             std::to_string(row + 1) + ", column " +
                             std::to_string(col + 1));
  }
  return v;
}

}  // namespace

TimeSeriesPanel load_csv(const std::string& path, bool has_header) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_csv: cannot open " + path);

  std::vector<std::string> names;
  std::vector<std::vector<double>> data;
  std::string line;
  int row = 0;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split_row(line);
    if (first && has_header) {
      names.assign(cells.begin(), cells.end());
      first = false;
      continue;
    }
    first = false;
    std::vector<double> vals;
    vals.reserve(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      vals.push_back(parse_cell(cells[c], row, static_cast<int>(c)));
    }
    if (!data.empty() && vals.size() != data.front().size()) {
      throw std::runtime_error("load_csv: ragged row " + std::to_string(row + 1) +
                               " has " + std::to_string(vals.size()) +
                               " columns, expected " +
                               std::to_string(data.front().size()));
    }
    data.push_back(std::move(vals));
    ++row;
  }
  if (data.empty()) throw std::runtime_error("load_csv: no observations");

  const int T = static_cast<int>(data.size());
  const int n = static_cast<int>(data.front().size());
  TimeSeriesPanel panel;
  panel.values.resize(T, n);
  for (int t = 0; t < T; ++t)
    for (int i = 0; i < n; ++i) panel.values(t, i) = data[t][i];
  if (names.empty()) {
    for (int i = 0; i < n; ++i) names.push_back("series" + std::to_string(i + 1));
  }
  if (static_cast<int>(names.size()) != n) {
    throw std::runtime_error("load_csv: header has " +
                             std::to_string(names.size()) +
                             " names but rows have " + std::to_string(n) +
                             " columns");
  }
  panel.series_names = std::move(names);
  return panel;
}

void write_csv(const TimeSeriesPanel& panel, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_csv: cannot open " + path);
  out.precision(17);
  for (int i = 0; i < panel.n(); ++i) {
    out << panel.series_names[i] << (i + 1 < panel.n() ? "," : "\n");
  }
  for (int t = 0; t < panel.T(); ++t)
    for (int i = 0; i < panel.n(); ++i)
      out << panel.values(t, i) << (i + 1 < panel.n() ? "," : "\n");
}

SeriesBounds compute_bounds(const TimeSeriesPanel& panel, double margin) {
  if (margin < 0.0) throw std::invalid_argument("compute_bounds: margin < 0");
  const int n = panel.n();
  SeriesBounds b;
  b.lb.resize(n);
  b.ub.resize(n);
  for (int i = 0; i < n; ++i) {
    const double lo = panel.values.col(i).minCoeff();
    const double hi = panel.values.col(i).maxCoeff();
    const double range = hi - lo;
    if (range <= 0.0 && margin == 0.0) {
      throw std::runtime_error("compute_bounds: series " + std::to_string(i + 1) +
                               " is constant (degenerate bounds)");
    }
    if (range <= 0.0) {
      throw std::runtime_error("compute_bounds: series " + std::to_string(i + 1) +
                               " is constant; margin cannot widen a zero range");
    }
    b.lb(i) = lo - margin * range;
    b.ub(i) = hi + margin * range;
  }
  return b;
}

LaggedDesign build_lagged_design(const TimeSeriesPanel& panel, int p) {
  if (p < 1) throw std::invalid_argument("build_lagged_design: p must be >= 1");
  const int T = panel.T();
  const int n = panel.n();
  if (p >= T) {
    throw std::invalid_argument("build_lagged_design: p (" + std::to_string(p) +
                                ") must be < T (" + std::to_string(T) + ")");
  }
  LaggedDesign d;
  d.p = p;
  d.N = n * p;
  const int rows = T - p;
  d.rows.resize(rows, d.N + 1);
  d.responses.resize(rows, n);
  for (int r = 0; r < rows; ++r) {
    const int t = p + r;  // response index (0-based)
    d.rows(r, 0) = 1.0;
    for (int j = 1; j <= p; ++j)
      for (int l = 0; l < n; ++l)
        d.rows(r, 1 + (j - 1) * n + l) = panel.values(t - j, l);
    d.responses.row(r) = panel.values.row(t);
  }
  return d;
}

}  // namespace sqvar
