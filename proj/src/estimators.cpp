#include "dale/estimators.hpp"

#include <algorithm>
#include <cmath>

#include "dale/errors.hpp"
#include "dale/jacobian.hpp"

namespace dale {
namespace {

// Rows of synthetic points are evaluated in blocks to bound memory.
constexpr std::size_t kBatchRows = 4096;

void check_lengths(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw Error(ErrorKind::shape, std::string(what) + " differ in length");
}

void check_model_data(const DifferentiableModel& model, const Dataset& X, std::size_t feature) {
  if (X.empty()) throw Error(ErrorKind::empty_input, "dataset has no rows");
  if (X.dim() != model.dim()) {
    throw Error(ErrorKind::shape, "dataset has " + std::to_string(X.dim()) + " features, model expects " +
                                      std::to_string(model.dim()));
  }
  if (feature >= X.dim()) {
    throw Error(ErrorKind::parameter, "feature index " + std::to_string(feature) + " out of range");
  }
}

// Shared tail of the first-order estimators: binning, filling, accumulation,
// standard error and centering of local slopes.
EffectCurve curve_from_slopes(std::string method, std::size_t feature, const BinGrid& grid,
                              std::span<const double> slopes, std::span<const std::size_t> bins,
                              EmptyBinPolicy policy) {
  const BinStats raw = bin_statistics(slopes, bins, grid.K);
  const BinStats st = fill_empty_bins(raw, policy);

  EffectCurve c;
  c.method = std::move(method);
  c.feature = feature;
  c.grid = grid;
  c.counts = st.counts;
  c.bin_means = st.mean;
  c.bin_variance = st.variance;
  c.flags = st.flags;
  c.bin_effects.resize(grid.K);
  c.accumulated.assign(grid.K + 1, 0.0);
  for (std::size_t k = 0; k < grid.K; ++k) {
    c.bin_effects[k] = grid.width * st.mean[k];
    c.accumulated[k + 1] = c.accumulated[k] + c.bin_effects[k];
  }
  c.std_error = curve_stderr(st, grid);
  return center_curve(std::move(c), st.counts);
}

EffectSurface surface_from_cells(std::string method, std::size_t l, std::size_t m,
                                 const BinGrid& grid_l, const BinGrid& grid_m,
                                 std::span<const double> local, std::span<const std::size_t> cells,
                                 EmptyBinPolicy policy) {
  const std::size_t P = grid_l.K;
  const std::size_t Q = grid_m.K;
  const BinStats st = fill_empty_cells(bin_statistics(local, cells, P * Q), P, Q, policy);

  EffectSurface s;
  s.method = std::move(method);
  s.feature_l = l;
  s.feature_m = m;
  s.grid_l = grid_l;
  s.grid_m = grid_m;
  s.counts = st.counts;
  s.cell_means = st.mean;
  s.flags = st.flags;
  s.cell_effects.resize(P * Q);
  const double area = grid_l.width * grid_m.width;
  s.accumulated = Matrix(P + 1, Q + 1, 0.0);
  for (std::size_t p = 0; p < P; ++p) {
    for (std::size_t q = 0; q < Q; ++q) {
      const double e = area * st.mean[p * Q + q];
      s.cell_effects[p * Q + q] = e;
      s.accumulated(p + 1, q + 1) =
          s.accumulated(p, q + 1) + s.accumulated(p + 1, q) - s.accumulated(p, q) + e;
    }
  }
  // Count-weighted mean of the cell-centre values (average of the four
  // corners) over occupied cells is made zero.
  const std::size_t n = st.total();
  if (n == 0) throw Error(ErrorKind::empty_input, "surface has no samples");
  double mean = 0.0;
  for (std::size_t p = 0; p < P; ++p) {
    for (std::size_t q = 0; q < Q; ++q) {
      const auto cnt = st.counts[p * Q + q];
      if (cnt == 0) continue;
      const double mid = 0.25 * (s.accumulated(p, q) + s.accumulated(p + 1, q) +
                                 s.accumulated(p, q + 1) + s.accumulated(p + 1, q + 1));
      mean += static_cast<double>(cnt) / static_cast<double>(n) * mid;
    }
  }
  s.centering_c = -mean;
  return s;
}

}  // namespace

std::size_t EffectCurve::sample_count() const noexcept {
  std::size_t n = 0;
  for (auto c : counts) n += c;
  return n;
}

std::vector<double> curve_stderr(const BinStats& stats, const BinGrid& grid) {
  check_lengths(stats.K(), grid.K, "statistics and grid");
  std::vector<double> out(grid.K + 1, 0.0);
  double acc = 0.0;
  for (std::size_t k = 0; k < grid.K; ++k) {
    if (stats.counts[k] >= 2 && std::isfinite(stats.variance[k])) {
      acc += stats.variance[k] / static_cast<double>(stats.counts[k]);
    }
    out[k + 1] = grid.width * std::sqrt(acc);
  }
  return out;
}

EffectCurve center_curve(EffectCurve curve, std::span<const std::size_t> counts) {
  check_lengths(counts.size(), curve.grid.K, "counts and grid");
  std::size_t n = 0;
  for (auto c : counts) n += c;
  if (n == 0) throw Error(ErrorKind::empty_input, "cannot center a curve with zero total count");
  double mean = 0.0;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    if (counts[k] == 0) continue;
    const double mid = 0.5 * (curve.accumulated[k] + curve.accumulated[k + 1]);
    mean += static_cast<double>(counts[k]) / static_cast<double>(n) * mid;
  }
  curve.centering_c = -mean;
  curve.centered.resize(curve.accumulated.size());
  for (std::size_t j = 0; j < curve.accumulated.size(); ++j) {
    curve.centered[j] = curve.accumulated[j] + curve.centering_c;
  }
  return curve;
}

CurvePoint evaluate_curve_at(const EffectCurve& curve, double x) {
  const auto& g = curve.grid;
  const std::size_t k = g.bin_of(x);
  if (x == g.edges[k + 1]) {
    return {curve.accumulated[k + 1] + curve.centering_c, curve.std_error[k + 1]};
  }
  const double dx = x - g.edges[k];
  const double value = curve.accumulated[k] + dx * curve.bin_means[k] + curve.centering_c;
  const double t = dx / g.width;
  const double se = curve.std_error[k] + t * (curve.std_error[k + 1] - curve.std_error[k]);
  return {value, se};
}

std::vector<double> evaluate_curve(const EffectCurve& curve, std::span<const double> xs) {
  std::vector<double> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) out[i] = evaluate_curve_at(curve, xs[i]).value;
  return out;
}

EffectCurve dale_first_order(std::span<const double> jacobian_column,
                             std::span<const double> feature_values, const BinGrid& grid,
                             EmptyBinPolicy policy, std::size_t feature) {
  check_lengths(jacobian_column.size(), feature_values.size(), "Jacobian column and feature values");
  const auto bins = assign_bins(feature_values, grid);
  return curve_from_slopes("dale", feature, grid, jacobian_column, bins, policy);
}

EffectCurve rebin(std::span<const double> jacobian_column, std::span<const double> feature_values,
                  std::size_t new_K, EmptyBinPolicy policy, std::size_t feature) {
  return dale_first_order(jacobian_column, feature_values, make_grid_for(feature_values, new_K),
                          policy, feature);
}

EffectCurve ale_first_order(const DifferentiableModel& model, const Dataset& X, std::size_t feature,
                            const BinGrid& grid, EmptyBinPolicy policy) {
  check_model_data(model, X, feature);
  const auto xs = X.column(feature);
  const auto bins = assign_bins(xs, grid);
  const std::size_t n = X.size();
  const std::size_t d = X.dim();
  std::vector<double> slopes(n);

  for (std::size_t start = 0; start < n; start += kBatchRows / 2) {
    const std::size_t stop = std::min(n, start + kBatchRows / 2);
    Matrix pts(2 * (stop - start), d);
    for (std::size_t i = start; i < stop; ++i) {
      auto hi = pts.row(2 * (i - start));
      auto lo = pts.row(2 * (i - start) + 1);
      const auto src = X.row(i);
      std::copy(src.begin(), src.end(), hi.begin());
      std::copy(src.begin(), src.end(), lo.begin());
      hi[feature] = grid.edges[bins[i] + 1];
      lo[feature] = grid.edges[bins[i]];
    }
    const auto f = model.value_batch(pts);
    for (std::size_t i = start; i < stop; ++i) {
      slopes[i] = (f[2 * (i - start)] - f[2 * (i - start) + 1]) / grid.width;
    }
  }
  return curve_from_slopes("ale", feature, grid, slopes, bins, policy);
}

std::vector<EffectCurve> dale_all_features(const Matrix& jacobian, const Dataset& X, std::size_t K,
                                           EmptyBinPolicy policy) {
  if (jacobian.rows() != X.size() || jacobian.cols() != X.dim()) {
    throw Error(ErrorKind::shape, "Jacobian shape does not match the dataset");
  }
  std::vector<EffectCurve> out;
  out.reserve(X.dim());
  for (std::size_t s = 0; s < X.dim(); ++s) {
    const auto col = jacobian.column(s);
    const auto xs = X.column(s);
    out.push_back(rebin(col, xs, K, policy, s));
  }
  return out;
}

std::vector<EffectCurve> dale_all_features(const DifferentiableModel& model, const Dataset& X,
                                           std::size_t K, EmptyBinPolicy policy) {
  return dale_all_features(jacobian_batch(model, X), X, K, policy);
}

std::vector<EffectCurve> ale_all_features(const DifferentiableModel& model, const Dataset& X,
                                          std::size_t K, EmptyBinPolicy policy) {
  std::vector<EffectCurve> out;
  out.reserve(X.dim());
  for (std::size_t s = 0; s < X.dim(); ++s) {
    const auto xs = X.column(s);
    out.push_back(ale_first_order(model, X, s, make_grid_for(xs, K), policy));
  }
  return out;
}

EffectSurface dale_second_order(std::span<const double> hessian_entries,
                                std::span<const double> values_l, std::span<const double> values_m,
                                const BinGrid& grid_l, const BinGrid& grid_m, EmptyBinPolicy policy,
                                std::size_t feature_l, std::size_t feature_m) {
  check_lengths(hessian_entries.size(), values_l.size(), "Hessian entries and feature values");
  check_lengths(values_l.size(), values_m.size(), "feature value columns");
  const auto bl = assign_bins(values_l, grid_l);
  const auto bm = assign_bins(values_m, grid_m);
  std::vector<std::size_t> cells(bl.size());
  for (std::size_t i = 0; i < bl.size(); ++i) cells[i] = bl[i] * grid_m.K + bm[i];
  return surface_from_cells("dale", feature_l, feature_m, grid_l, grid_m, hessian_entries, cells,
                            policy);
}

EffectSurface ale_second_order(const DifferentiableModel& model, const Dataset& X, std::size_t l,
                               std::size_t m, const BinGrid& grid_l, const BinGrid& grid_m,
                               EmptyBinPolicy policy) {
  check_model_data(model, X, l);
  check_model_data(model, X, m);
  if (l == m) throw Error(ErrorKind::parameter, "second-order ALE needs two distinct features");
  const auto bl = assign_bins(X.column(l), grid_l);
  const auto bm = assign_bins(X.column(m), grid_m);
  const std::size_t n = X.size();
  const std::size_t d = X.dim();
  const double area = grid_l.width * grid_m.width;
  std::vector<double> local(n);
  std::vector<std::size_t> cells(n);

  for (std::size_t start = 0; start < n; start += kBatchRows / 4) {
    const std::size_t stop = std::min(n, start + kBatchRows / 4);
    Matrix pts(4 * (stop - start), d);
    for (std::size_t i = start; i < stop; ++i) {
      const auto src = X.row(i);
      const double lo_l = grid_l.edges[bl[i]], hi_l = grid_l.edges[bl[i] + 1];
      const double lo_m = grid_m.edges[bm[i]], hi_m = grid_m.edges[bm[i] + 1];
      const double corners[4][2] = {{hi_l, hi_m}, {lo_l, hi_m}, {hi_l, lo_m}, {lo_l, lo_m}};
      for (std::size_t c = 0; c < 4; ++c) {
        auto row = pts.row(4 * (i - start) + c);
        std::copy(src.begin(), src.end(), row.begin());
        row[l] = corners[c][0];
        row[m] = corners[c][1];
      }
    }
    const auto f = model.value_batch(pts);
    for (std::size_t i = start; i < stop; ++i) {
      const std::size_t b = 4 * (i - start);
      local[i] = ((f[b] - f[b + 1]) - (f[b + 2] - f[b + 3])) / area;
      cells[i] = bl[i] * grid_m.K + bm[i];
    }
  }
  return surface_from_cells("ale", l, m, grid_l, grid_m, local, cells, policy);
}

double evaluate_surface_at(const EffectSurface& s, double x_l, double x_m) {
  const std::size_t pl = s.grid_l.bin_of(x_l);
  const std::size_t pm = s.grid_m.bin_of(x_m);
  const std::size_t Q = s.grid_m.K;
  // Fraction of each bin covered by [z_0, x] along one axis.
  auto cover = [](const BinGrid& g, std::size_t k, std::size_t kx, double x) {
    if (k < kx) return 1.0;
    if (k > kx) return 0.0;
    return (x - g.edges[k]) / g.width;
  };
  double acc = s.accumulated(pl, pm);
  for (std::size_t p = 0; p <= pl; ++p) {
    const double fl = cover(s.grid_l, p, pl, x_l);
    for (std::size_t q = 0; q <= pm; ++q) {
      if (p < pl && q < pm) continue;  // already inside accumulated(pl, pm)
      acc += fl * cover(s.grid_m, q, pm, x_m) * s.cell_effects[p * Q + q];
    }
  }
  return acc + s.centering_c;
}

PointCurve pdp(const DifferentiableModel& model, const Dataset& X, std::size_t feature,
               std::span<const double> eval_points) {
  check_model_data(model, X, feature);
  PointCurve out;
  out.method = "pdp";
  out.feature = feature;
  out.xs.assign(eval_points.begin(), eval_points.end());
  out.values.reserve(eval_points.size());
  Matrix pts = X.values();
  for (double x : eval_points) {
    if (!(x >= X.min(feature) && x <= X.max(feature))) {
      throw Error(ErrorKind::parameter, "PDP evaluation point outside the feature range");
    }
    for (std::size_t i = 0; i < pts.rows(); ++i) pts(i, feature) = x;
    const auto f = model.value_batch(pts);
    double acc = 0.0;
    for (double v : f) acc += v;
    out.values.push_back(acc / static_cast<double>(f.size()));
  }
  return out;
}

PointCurve mplot(const DifferentiableModel& model, const Dataset& X, std::size_t feature,
                 const BinGrid& grid, EmptyBinPolicy policy) {
  check_model_data(model, X, feature);
  const auto bins = assign_bins(X.column(feature), grid);
  const auto f = model.value_batch(X.values());
  const BinStats st = fill_empty_bins(bin_statistics(f, bins, grid.K), policy);
  PointCurve out;
  out.method = "mplot";
  out.feature = feature;
  for (std::size_t k = 0; k < grid.K; ++k) out.xs.push_back(grid.center(k));
  out.values = st.mean;
  out.counts = st.counts;
  out.flags = st.flags;
  return out;
}

}  // namespace dale
