#pragma once

#include <span>
#include <string>
#include <vector>

#include "dale/binning.hpp"
#include "dale/dataset.hpp"
#include "dale/model.hpp"

namespace dale {

// Accumulated first-order feature effect on a bin grid.
//
// Both DALE and the ALE approximation produce this: the instance effects are
// local slopes (exact partial derivatives for DALE, bin-edge finite
// differences divided by the bin width for ALE), so bin_means are in
// derivative units and bin_effects = width * bin_means.
struct EffectCurve {
  std::string method;
  std::size_t feature = 0;
  BinGrid grid;
  std::vector<std::size_t> counts;
  std::vector<double> bin_means;    // mean local effect per bin
  std::vector<double> bin_effects;  // width * bin_means
  std::vector<double> bin_variance; // sample variance of the local effects; NaN when missing
  std::vector<BinFlag> flags;
  std::vector<double> accumulated;  // K + 1 edge values, accumulated[0] = 0
  double centering_c = 0.0;
  std::vector<double> centered;     // accumulated + centering_c
  std::vector<double> std_error;      // K + 1, standard error at every edge

  std::size_t K() const noexcept { return grid.K; }
  std::size_t sample_count() const noexcept;
};

struct CurvePoint {
  double value = 0.0;
  double std_error = 0.0;
};

// Second-order effect over a P x Q grid of cells.
struct EffectSurface {
  std::string method;
  std::size_t feature_l = 0;
  std::size_t feature_m = 1;
  BinGrid grid_l;
  BinGrid grid_m;
  std::vector<std::size_t> counts;   // P * Q, row-major (p * Q + q)
  std::vector<double> cell_means;    // mean mixed local effect per cell
  std::vector<double> cell_effects;  // width_l * width_m * cell_means
  std::vector<BinFlag> flags;
  Matrix accumulated;                // (P + 1) x (Q + 1), accumulated(0, *) = accumulated(*, 0) = 0
  double centering_c = 0.0;

  double centered(std::size_t i, std::size_t j) const { return accumulated(i, j) + centering_c; }
};

// Effect values at arbitrary points (PDP, MPlot).
struct PointCurve {
  std::string method;
  std::size_t feature = 0;
  std::vector<double> xs;
  std::vector<double> values;
  std::vector<std::size_t> counts;  // per point; empty for PDP
  std::vector<BinFlag> flags;       // per point; empty for PDP
};

// stderr[0] = 0, stderr[j] = width * sqrt(sum_{k<j} variance_k / count_k).
// Empty, filled and singleton bins contribute 0.
std::vector<double> curve_stderr(const BinStats& stats, const BinGrid& grid);

// c = -sum_k (counts_k / N) * (mid-bin value), mid-bin value being the mean
// of the two edge values; fills curve.centering_c and curve.centered.
EffectCurve center_curve(EffectCurve curve, std::span<const std::size_t> counts);

// Full bin-width steps up to the bin holding x, a partial step inside it,
// then centering. The standard error is interpolated linearly between edges.
CurvePoint evaluate_curve_at(const EffectCurve& curve, double x);
std::vector<double> evaluate_curve(const EffectCurve& curve, std::span<const double> xs);

// First-order DALE from a cached Jacobian column. Performs no model
// evaluations.
EffectCurve dale_first_order(std::span<const double> jacobian_column,
                             std::span<const double> feature_values, const BinGrid& grid,
                             EmptyBinPolicy policy = EmptyBinPolicy::interpolate,
                             std::size_t feature = 0);

// DALE on a fresh K-bin grid over the observed range of feature_values.
EffectCurve rebin(std::span<const double> jacobian_column, std::span<const double> feature_values,
                  std::size_t new_K, EmptyBinPolicy policy = EmptyBinPolicy::interpolate,
                  std::size_t feature = 0);

// ALE approximation: two evaluations per sample, at the edges of that
// sample's own bin.
EffectCurve ale_first_order(const DifferentiableModel& model, const Dataset& X, std::size_t feature,
                            const BinGrid& grid, EmptyBinPolicy policy = EmptyBinPolicy::interpolate);

// All-feature pipelines over K-bin grids spanning each feature's observed
// range. DALE: one Jacobian (N gradient calls). ALE: 2 N D value calls.
std::vector<EffectCurve> dale_all_features(const DifferentiableModel& model, const Dataset& X,
                                           std::size_t K,
                                           EmptyBinPolicy policy = EmptyBinPolicy::interpolate);
std::vector<EffectCurve> dale_all_features(const Matrix& jacobian, const Dataset& X, std::size_t K,
                                           EmptyBinPolicy policy = EmptyBinPolicy::interpolate);
std::vector<EffectCurve> ale_all_features(const DifferentiableModel& model, const Dataset& X,
                                          std::size_t K,
                                          EmptyBinPolicy policy = EmptyBinPolicy::interpolate);

EffectSurface dale_second_order(std::span<const double> hessian_entries,
                                std::span<const double> values_l, std::span<const double> values_m,
                                const BinGrid& grid_l, const BinGrid& grid_m,
                                EmptyBinPolicy policy = EmptyBinPolicy::interpolate,
                                std::size_t feature_l = 0, std::size_t feature_m = 1);

// Four corner evaluations per sample.
EffectSurface ale_second_order(const DifferentiableModel& model, const Dataset& X, std::size_t l,
                               std::size_t m, const BinGrid& grid_l, const BinGrid& grid_m,
                               EmptyBinPolicy policy = EmptyBinPolicy::interpolate);

// Centered surface value: every cell contributes its effect density times
// its overlap with [z_l0, x_l] x [z_m0, x_m].
double evaluate_surface_at(const EffectSurface& surface, double x_l, double x_m);

// Monte-Carlo PDP over the empirical distribution of the other features.
// N value evaluations per point.
PointCurve pdp(const DifferentiableModel& model, const Dataset& X, std::size_t feature,
               std::span<const double> eval_points);

// Per-bin mean prediction at the bin centers (N value evaluations).
PointCurve mplot(const DifferentiableModel& model, const Dataset& X, std::size_t feature,
                 const BinGrid& grid, EmptyBinPolicy policy = EmptyBinPolicy::interpolate);

}  // namespace dale
