#include "dale/binning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "dale/errors.hpp"

namespace dale {
namespace {

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

std::string format_value(double v) {
  std::ostringstream ss;
  ss.precision(17);
  ss << v;
  return ss.str();
}

// Fills missing entries of `values` (mask true = present) along one axis.
void interpolate_line(std::vector<double>& values, const std::vector<bool>& present) {
  const std::size_t n = values.size();
  std::size_t prev = n;  // index of the last present entry
  for (std::size_t k = 0; k < n; ++k) {
    if (!present[k]) continue;
    if (prev == n) {
      for (std::size_t j = 0; j < k; ++j) values[j] = values[k];
    } else {
      const double span = static_cast<double>(k - prev);
      for (std::size_t j = prev + 1; j < k; ++j) {
        const double t = static_cast<double>(j - prev) / span;
        values[j] = values[prev] + t * (values[k] - values[prev]);
      }
    }
    prev = k;
  }
  if (prev != n) {
    for (std::size_t j = prev + 1; j < n; ++j) values[j] = values[prev];
  }
}

}  // namespace

std::size_t BinGrid::bin_of(double x) const {
  if (!(x >= axis_min && x <= axis_max)) {
    throw Error(ErrorKind::allocation, "value " + format_value(x) + " lies outside the grid [" +
                                           format_value(axis_min) + ", " + format_value(axis_max) + "]");
  }
  if (x == axis_max) return K - 1;
  auto k = static_cast<std::size_t>(std::floor((x - axis_min) / width));
  k = std::min(k, K - 1);
  // Guard against rounding in the division: honour the stored edges.
  while (k > 0 && x < edges[k]) --k;
  while (k + 1 < K && x >= edges[k + 1]) ++k;
  return k;
}

BinGrid make_grid(double axis_min, double axis_max, std::size_t K) {
  if (K == 0) throw Error(ErrorKind::parameter, "number of bins must be at least 1");
  if (!std::isfinite(axis_min) || !std::isfinite(axis_max) || !(axis_max > axis_min)) {
    throw Error(ErrorKind::parameter, "degenerate bin range [" + format_value(axis_min) + ", " +
                                          format_value(axis_max) + "]");
  }
  BinGrid g;
  g.axis_min = axis_min;
  g.axis_max = axis_max;
  g.K = K;
  g.width = (axis_max - axis_min) / static_cast<double>(K);
  g.edges.resize(K + 1);
  for (std::size_t j = 0; j < K; ++j) g.edges[j] = axis_min + static_cast<double>(j) * g.width;
  g.edges[K] = axis_max;
  return g;
}

BinGrid make_grid_for(std::span<const double> values, std::size_t K) {
  if (values.empty()) throw Error(ErrorKind::empty_input, "cannot build a grid over no values");
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  return make_grid(*lo, *hi, K);
}

std::vector<std::size_t> assign_bins(std::span<const double> values, const BinGrid& grid) {
  std::vector<std::size_t> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = grid.bin_of(values[i]);
  return out;
}

const char* to_string(BinFlag f) {
  switch (f) {
    case BinFlag::ok: return "ok";
    case BinFlag::empty: return "empty";
    case BinFlag::singleton: return "singleton";
    case BinFlag::filled: return "filled";
  }
  return "?";
}

std::size_t BinStats::total() const noexcept {
  std::size_t n = 0;
  for (auto c : counts) n += c;
  return n;
}

BinStats bin_statistics(std::span<const double> local_effects,
                        std::span<const std::size_t> bin_index, std::size_t K) {
  if (local_effects.size() != bin_index.size()) {
    throw Error(ErrorKind::shape, "local effects and bin indices differ in length");
  }
  BinStats st;
  st.counts.assign(K, 0);
  std::vector<double> sum(K, 0.0);
  for (std::size_t i = 0; i < bin_index.size(); ++i) {
    const auto k = bin_index[i];
    if (k >= K) throw Error(ErrorKind::parameter, "bin index " + std::to_string(k) + " out of range");
    ++st.counts[k];
    sum[k] += local_effects[i];
  }
  st.mean.assign(K, kMissing);
  for (std::size_t k = 0; k < K; ++k) {
    if (st.counts[k] > 0) st.mean[k] = sum[k] / static_cast<double>(st.counts[k]);
  }
  // Two-pass variance for numerical stability.
  std::vector<double> ss(K, 0.0);
  for (std::size_t i = 0; i < bin_index.size(); ++i) {
    const double d = local_effects[i] - st.mean[bin_index[i]];
    ss[bin_index[i]] += d * d;
  }
  st.variance.assign(K, kMissing);
  st.empty_mask.assign(K, false);
  st.singleton_mask.assign(K, false);
  st.flags.assign(K, BinFlag::ok);
  for (std::size_t k = 0; k < K; ++k) {
    if (st.counts[k] == 0) {
      st.empty_mask[k] = true;
      st.flags[k] = BinFlag::empty;
    } else if (st.counts[k] == 1) {
      st.variance[k] = 0.0;
      st.singleton_mask[k] = true;
      st.flags[k] = BinFlag::singleton;
    } else {
      st.variance[k] = ss[k] / static_cast<double>(st.counts[k] - 1);
    }
  }
  return st;
}

EmptyBinPolicy parse_empty_bin_policy(const std::string& name) {
  if (name == "interpolate") return EmptyBinPolicy::interpolate;
  if (name == "zero") return EmptyBinPolicy::zero;
  if (name == "fail") return EmptyBinPolicy::fail;
  throw Error(ErrorKind::usage, "unknown empty-bin policy '" + name + "'");
}

const char* to_string(EmptyBinPolicy p) {
  switch (p) {
    case EmptyBinPolicy::interpolate: return "interpolate";
    case EmptyBinPolicy::zero: return "zero";
    case EmptyBinPolicy::fail: return "fail";
  }
  return "?";
}

BinStats fill_empty_bins(BinStats stats, EmptyBinPolicy policy) {
  const std::size_t K = stats.K();
  return fill_empty_cells(std::move(stats), 1, K, policy);
}

BinStats fill_empty_cells(BinStats stats, std::size_t P, std::size_t Q, EmptyBinPolicy policy) {
  const std::size_t n = stats.K();
  if (P * Q != n) throw Error(ErrorKind::shape, "cell layout does not match the statistics");
  const bool any_empty = std::any_of(stats.empty_mask.begin(), stats.empty_mask.end(),
                                     [](bool e) { return e; });
  if (!any_empty) return stats;
  const bool all_empty = std::all_of(stats.empty_mask.begin(), stats.empty_mask.end(),
                                     [](bool e) { return e; });
  if (all_empty) throw Error(ErrorKind::empty_input, "every bin is empty");

  switch (policy) {
    case EmptyBinPolicy::fail: {
      const auto it = std::find(stats.empty_mask.begin(), stats.empty_mask.end(), true);
      throw Error(ErrorKind::numeric,
                  "bin " + std::to_string(it - stats.empty_mask.begin()) + " is empty");
    }
    case EmptyBinPolicy::zero:
      for (std::size_t k = 0; k < n; ++k)
        if (stats.empty_mask[k]) stats.mean[k] = 0.0;
      break;
    case EmptyBinPolicy::interpolate: {
      std::vector<bool> row_has_data(P, false);
      for (std::size_t p = 0; p < P; ++p) {
        std::vector<double> line(stats.mean.begin() + static_cast<std::ptrdiff_t>(p * Q),
                                 stats.mean.begin() + static_cast<std::ptrdiff_t>((p + 1) * Q));
        std::vector<bool> present(Q);
        for (std::size_t q = 0; q < Q; ++q) present[q] = !stats.empty_mask[p * Q + q];
        row_has_data[p] = std::any_of(present.begin(), present.end(), [](bool b) { return b; });
        if (!row_has_data[p]) continue;
        interpolate_line(line, present);
        std::copy(line.begin(), line.end(), stats.mean.begin() + static_cast<std::ptrdiff_t>(p * Q));
      }
      for (std::size_t q = 0; q < Q; ++q) {
        std::vector<double> line(P);
        for (std::size_t p = 0; p < P; ++p) line[p] = stats.mean[p * Q + q];
        interpolate_line(line, row_has_data);
        for (std::size_t p = 0; p < P; ++p) stats.mean[p * Q + q] = line[p];
      }
      break;
    }
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (stats.empty_mask[k]) stats.flags[k] = BinFlag::filled;
  }
  return stats;
}

}  // namespace dale
