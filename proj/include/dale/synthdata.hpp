#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "dale/dataset.hpp"
#include "dale/model.hpp"
#include "dale/oracles.hpp"

namespace dale {

// Every generator draws row i from the stream SplitMix64(seed, i), so a
// dataset is a pure function of its arguments and rows can be produced in
// any order.

// x1 ~ U(0, 1), x2 = x1.
Dataset gen_toy(std::size_t N, std::uint64_t seed);
// f = 1 - x1 - x2 when x1 + x2 <= 1, else 0.
AnalyticModel toy_model();
// x2 = z.
ConditionalSampler toy_conditional_sampler();

// x1 ~ U(0, 10), x2 = x1.
Dataset gen_ood_demo(std::size_t N, std::uint64_t seed);
// d = x1 - x2. f = x1 x2 for |d| < 0.5, else
// x1 x2 + gamma * sign(d) * (|d| - 0.5)^2.
AnalyticModel ood_model(double gamma = 100.0);

// i.i.d. standard normal entries.
Dataset gen_case1(std::size_t N, std::size_t D, std::uint64_t seed);

struct Case2Params {
  double tau = 0.5;
  double alpha = 10.0;
  double sigma2 = 0.1;           // standard deviation of x2 around x1
  double sigma3_sq = 10.0;       // variance of x3
  std::vector<double> centers{1.5, 3.0, 5.0, 7.0, 8.5};
  double cluster_sigma = 0.25;   // per-cluster standard deviation of x1
  double lo = 0.0;               // x1 truncation range
  double hi = 10.0;
};

// x1 from an equal-weight Gaussian mixture truncated to [lo, hi] by
// resampling, x2 ~ N(x1, sigma2^2), x3 ~ N(0, sigma3_sq).
Dataset gen_case2(std::size_t N, std::uint64_t seed, const Case2Params& params = {});
// r = x1 - x2, f0 = x1 x2 + x1 x3, g = alpha (r^2 - tau^2):
// f0 for |r| < tau, f0 - g for r >= tau, f0 + g for r <= -tau.
AnalyticModel case2_model(double tau = 0.5, double alpha = 10.0);
// Draws of (x1, x2, x3) with x1 = z. With `antithetic` consecutive rows
// carry mirrored noise, which makes the x3 term cancel exactly in means.
ConditionalSampler case2_conditional_sampler(const Case2Params& params = {},
                                             bool antithetic = true);

struct GeneratorSpec {
  std::string name;  // toy | ood-demo | case1 | case2
  std::uint64_t seed = 0;
  std::size_t N = 1000;
  std::size_t D = 2;  // case1 only
  Case2Params case2;
};

// Throws a usage error for an unknown generator name, a parameter error for
// out-of-range parameters.
Dataset generate(const GeneratorSpec& spec);

// Header row of feature names, then one line per row in %.17g.
void write_csv(std::ostream& out, const Dataset& data);
void write_csv(const std::string& path, const Dataset& data);

}  // namespace dale
