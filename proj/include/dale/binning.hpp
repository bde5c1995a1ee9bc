#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace dale {

// Equal-width partition of [axis_min, axis_max] into K bins.
struct BinGrid {
  double axis_min = 0.0;
  double axis_max = 1.0;
  std::size_t K = 1;
  double width = 1.0;
  std::vector<double> edges;  // K + 1 values

  double edge(std::size_t j) const { return edges[j]; }
  double center(std::size_t k) const { return 0.5 * (edges[k] + edges[k + 1]); }
  bool contains(double x) const { return x >= axis_min && x <= axis_max; }
  // Bin of a single in-range value; throws an allocation error otherwise.
  std::size_t bin_of(double x) const;

  bool operator==(const BinGrid&) const = default;
};

BinGrid make_grid(double axis_min, double axis_max, std::size_t K);
// Grid over the observed range of `values`.
BinGrid make_grid_for(std::span<const double> values, std::size_t K);

// Intervals are [z_{k-1}, z_k); the last bin also includes axis_max.
std::vector<std::size_t> assign_bins(std::span<const double> values, const BinGrid& grid);

enum class BinFlag : std::uint8_t {
  ok = 0,
  empty,      // no samples; mean is missing until filled
  singleton,  // one sample; variance recorded as 0
  filled,     // was empty, mean supplied by fill_empty_bins
};

const char* to_string(BinFlag f);

struct BinStats {
  std::vector<std::size_t> counts;
  std::vector<double> mean;      // NaN for empty bins until filled
  std::vector<double> variance;  // Bessel-corrected; 0 for singletons, NaN when missing
  std::vector<bool> empty_mask;
  std::vector<bool> singleton_mask;
  std::vector<BinFlag> flags;

  std::size_t K() const noexcept { return counts.size(); }
  std::size_t total() const noexcept;
};

// Per-bin mean and sample variance, summed in dataset order.
BinStats bin_statistics(std::span<const double> local_effects,
                        std::span<const std::size_t> bin_index, std::size_t K);

enum class EmptyBinPolicy { interpolate, zero, fail };

EmptyBinPolicy parse_empty_bin_policy(const std::string& name);
const char* to_string(EmptyBinPolicy p);

// interpolate: linear interpolation of means between the nearest non-empty
// neighbours (by bin index), constant extension at both ends. zero: mean 0.
// fail: throws on any empty bin. Filled bins keep count 0 and NaN variance.
BinStats fill_empty_bins(BinStats stats, EmptyBinPolicy policy);

// Row-major P x Q cell layout, index p * Q + q. Interpolation runs along q
// inside each row first, then rows without any data are filled along p.
BinStats fill_empty_cells(BinStats stats, std::size_t P, std::size_t Q, EmptyBinPolicy policy);

}  // namespace dale
