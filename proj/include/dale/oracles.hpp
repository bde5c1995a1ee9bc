#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "dale/estimators.hpp"
#include "dale/model.hpp"
#include "dale/rng.hpp"

namespace dale {

// Closed-form effects of the piecewise-linear toy with x2 = x1 ~ U(0, 1).
// Each throws a parameter error outside [0, 1].
double toy_pdp_truth(double x1);
double toy_mp_truth(double x1);
double toy_ale_truth(double x1);

enum class TruthProvenance { closed_form, numeric_integration };
const char* to_string(TruthProvenance p);

struct GroundTruthEffect {
  std::function<double(double)> evaluator;  // centered effect
  double lo = 0.0;
  double hi = 1.0;
  TruthProvenance provenance = TruthProvenance::closed_form;
  // Numeric variant only.
  double quad_step = 0.0;
  std::size_t mc_samples = 0;
  std::vector<double> nodes;
  std::vector<double> node_values;  // centered
  std::vector<double> node_stderr;  // Monte-Carlo standard error of the accumulation

  // Throws a parameter error outside [lo, hi].
  double operator()(double x) const;
};

GroundTruthEffect toy_ale_ground_truth();

// Feature x1 of the three-part synthetic function with x2 ~ N(x1, sigma2^2)
// and zero-mean x3: E[f_1 | x1 = z] = z - 4 alpha sigma2 phi(tau / sigma2),
// accumulated from lo and centered by its mean over [lo, hi].
GroundTruthEffect case2_ale_ground_truth(double tau, double alpha, double sigma2, double lo,
                                         double hi);

// Fills `out` (n rows, model dimension columns) with draws of X given
// X_s = z; column s of every row must equal z.
using ConditionalSampler =
    std::function<void(double z, std::size_t n, SplitMix64& rng, Matrix& out)>;

struct NumericTruthOptions {
  std::size_t n_quad = 200;  // quadrature steps
  std::size_t n_mc = 1000;   // conditional draws per node
  std::uint64_t seed = 0;
  // Optional draws of X_s used for data-weighted centering; when empty the
  // curve is centered by its mean over [lo, hi].
  std::vector<double> centering_samples;
};

// Trapezoidal accumulation of the Monte-Carlo estimate of E[f_s | X_s = z]
// over an equispaced grid of n_quad + 1 nodes on [lo, hi]. Node z_j uses the
// stream SplitMix64(seed, j).
GroundTruthEffect numeric_ale_truth(const DifferentiableModel& model, std::size_t feature,
                                    const ConditionalSampler& sampler, double lo, double hi,
                                    const NumericTruthOptions& options = {});

// Mean squared difference over variance of the truth, both sequences
// centered by their own mean first. Needs at least two points and a truth
// with positive variance (numeric error otherwise).
double nmse(std::span<const double> approx, std::span<const double> truth);
double nmse(const EffectCurve& approx, const GroundTruthEffect& truth,
            std::span<const double> eval_points);
// Evaluates on the curve's K + 1 edges.
double nmse(const EffectCurve& approx, const GroundTruthEffect& truth);
// Against another curve, compared on the edges of `approx`.
double nmse(const EffectCurve& approx, const EffectCurve& reference);

}  // namespace dale
