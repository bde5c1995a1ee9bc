#pragma once

// Straight-from-the-definition versions of the estimators, written without
// the library's binning or accumulation code, for cross-checking.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace ref {

struct Curve {
  std::vector<double> edges;
  std::vector<double> centered;  // at the edges
  std::vector<double> means;
  std::vector<std::size_t> counts;
};

inline std::size_t bin_index(double x, double lo, double hi, std::size_t K) {
  // Linear scan over explicitly computed edges.
  const double w = (hi - lo) / static_cast<double>(K);
  for (std::size_t k = 0; k + 1 < K; ++k)
    if (x < lo + static_cast<double>(k + 1) * w) return k;
  return K - 1;
}

// Local effects are given per sample, already in slope units. Assumes no
// empty bins.
inline Curve accumulate(const std::vector<double>& xs, const std::vector<double>& slopes, std::size_t K) {
  const double lo = *std::min_element(xs.begin(), xs.end());
  const double hi = *std::max_element(xs.begin(), xs.end());
  const double w = (hi - lo) / static_cast<double>(K);
  Curve c;
  c.means.assign(K, 0.0);
  c.counts.assign(K, 0);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const auto k = bin_index(xs[i], lo, hi, K);
    c.means[k] += slopes[i];
    ++c.counts[k];
  }
  for (std::size_t k = 0; k < K; ++k) c.means[k] /= static_cast<double>(c.counts[k]);
  std::vector<double> acc(K + 1, 0.0);
  for (std::size_t k = 0; k < K; ++k) acc[k + 1] = acc[k] + w * c.means[k];
  // Data-weighted mean of the curve, each sample represented by the
  // midpoint value of its bin.
  double mean = 0.0;
  for (std::size_t k = 0; k < K; ++k)
    mean += static_cast<double>(c.counts[k]) * 0.5 * (acc[k] + acc[k + 1]);
  mean /= static_cast<double>(xs.size());
  for (std::size_t j = 0; j <= K; ++j) {
    c.edges.push_back(lo + static_cast<double>(j) * w);
    c.centered.push_back(acc[j] - mean);
  }
  return c;
}

// Composite Simpson rule with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 2000) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

}  // namespace ref
