#include "dale/oracles.hpp"

#include <cmath>

#include "dale/errors.hpp"

namespace dale {
namespace {

void check_unit(double x) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw Error(ErrorKind::parameter, "toy effect is defined on [0, 1] only, got " + std::to_string(x));
  }
}

}  // namespace

double toy_pdp_truth(double x1) {
  check_unit(x1);
  return 0.5 * (1.0 - x1) * (1.0 - x1);
}

double toy_mp_truth(double x1) {
  check_unit(x1);
  return x1 <= 0.5 ? 1.0 - 2.0 * x1 : 0.0;
}

double toy_ale_truth(double x1) {
  check_unit(x1);
  return x1 <= 0.5 ? 0.375 - x1 : -0.125;
}

const char* to_string(TruthProvenance p) {
  return p == TruthProvenance::closed_form ? "closed-form" : "numeric-integration";
}

double GroundTruthEffect::operator()(double x) const {
  if (!(x >= lo && x <= hi)) {
    throw Error(ErrorKind::parameter, "ground truth queried outside its domain");
  }
  return evaluator(x);
}

GroundTruthEffect toy_ale_ground_truth() {
  GroundTruthEffect t;
  t.evaluator = toy_ale_truth;
  t.lo = 0.0;
  t.hi = 1.0;
  t.provenance = TruthProvenance::closed_form;
  return t;
}

GroundTruthEffect case2_ale_ground_truth(double tau, double alpha, double sigma2, double lo,
                                         double hi) {
  if (!(tau > 0.0) || !(sigma2 > 0.0)) throw Error(ErrorKind::parameter, "tau and sigma2 must be positive");
  if (!(hi > lo)) throw Error(ErrorKind::parameter, "degenerate truth domain");
  const double u = tau / sigma2;
  const double phi = std::exp(-0.5 * u * u) / std::sqrt(2.0 * std::acos(-1.0));
  const double c0 = 4.0 * alpha * sigma2 * phi;
  auto F = [lo, c0](double z) { return 0.5 * (z * z - lo * lo) - c0 * (z - lo); };
  const double mean =
      0.5 * ((hi * hi * hi - lo * lo * lo) / (3.0 * (hi - lo)) - lo * lo) - c0 * (0.5 * (hi + lo) - lo);
  GroundTruthEffect t;
  t.evaluator = [F, mean](double z) { return F(z) - mean; };
  t.lo = lo;
  t.hi = hi;
  t.provenance = TruthProvenance::closed_form;
  return t;
}

GroundTruthEffect numeric_ale_truth(const DifferentiableModel& model, std::size_t feature,
                                    const ConditionalSampler& sampler, double lo, double hi,
                                    const NumericTruthOptions& options) {
  if (options.n_quad < 10) throw Error(ErrorKind::parameter, "n_quad must be at least 10");
  if (options.n_mc < 1) throw Error(ErrorKind::parameter, "n_mc must be at least 1");
  if (feature >= model.dim()) throw Error(ErrorKind::parameter, "feature index out of range");
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(hi > lo)) {
    throw Error(ErrorKind::parameter, "degenerate truth domain");
  }
  const std::size_t n = options.n_quad;
  const double h = (hi - lo) / static_cast<double>(n);
  std::vector<double> z(n + 1), mean(n + 1), var(n + 1);
  Matrix draws(options.n_mc, model.dim());
  std::vector<double> grad(model.dim());
  for (std::size_t j = 0; j <= n; ++j) {
    z[j] = j == n ? hi : lo + static_cast<double>(j) * h;
    SplitMix64 rng(options.seed, j);
    try {
      sampler(z[j], options.n_mc, rng, draws);
    } catch (const Error&) {
      throw;
    } catch (const std::exception& e) {
      throw Error(ErrorKind::numeric, std::string("conditional sampler failed: ") + e.what());
    }
    if (draws.rows() != options.n_mc || draws.cols() != model.dim()) {
      throw Error(ErrorKind::shape, "conditional sampler returned the wrong shape");
    }
    double sum = 0.0, sumsq = 0.0;
    std::vector<double> fs(options.n_mc);
    for (std::size_t i = 0; i < options.n_mc; ++i) {
      model.gradient(draws.row(i), grad);
      if (!std::isfinite(grad[feature])) {
        throw Error(ErrorKind::numeric, "non-finite gradient at z = " + std::to_string(z[j]));
      }
      fs[i] = grad[feature];
      sum += fs[i];
    }
    mean[j] = sum / static_cast<double>(options.n_mc);
    for (double v : fs) sumsq += (v - mean[j]) * (v - mean[j]);
    var[j] = options.n_mc > 1 ? sumsq / static_cast<double>(options.n_mc - 1) : 0.0;
  }

  GroundTruthEffect t;
  t.lo = lo;
  t.hi = hi;
  t.provenance = TruthProvenance::numeric_integration;
  t.quad_step = h;
  t.mc_samples = options.n_mc;
  t.nodes = z;
  t.node_values.assign(n + 1, 0.0);
  t.node_stderr.assign(n + 1, 0.0);
  // Node j enters the trapezoid sum with weight h/2 at the ends of each step.
  double se_acc = 0.0;
  const double m = static_cast<double>(options.n_mc);
  for (std::size_t j = 1; j <= n; ++j) {
    const double step = z[j] - z[j - 1];
    t.node_values[j] = t.node_values[j - 1] + 0.5 * step * (mean[j - 1] + mean[j]);
    se_acc += (j == 1 ? 0.25 : 1.0) * step * step * var[j - 1] / m;
    t.node_stderr[j] = std::sqrt(se_acc + 0.25 * step * step * var[j] / m);
  }

  auto interp = [nodes = t.nodes, h, lo, n](const std::vector<double>& vals, double x) {
    auto k = static_cast<std::size_t>(std::floor((x - lo) / h));
    if (k >= n) k = n - 1;
    const double u = (x - nodes[k]) / (nodes[k + 1] - nodes[k]);
    return vals[k] + u * (vals[k + 1] - vals[k]);
  };

  double c = 0.0;
  if (!options.centering_samples.empty()) {
    for (double x : options.centering_samples) {
      if (!(x >= lo && x <= hi)) throw Error(ErrorKind::parameter, "centering sample outside the domain");
      c += interp(t.node_values, x);
    }
    c /= static_cast<double>(options.centering_samples.size());
  } else {
    for (std::size_t j = 1; j <= n; ++j) c += 0.5 * (t.node_values[j - 1] + t.node_values[j]);
    c /= static_cast<double>(n);
  }
  for (double& v : t.node_values) v -= c;
  t.evaluator = [vals = t.node_values, interp](double x) { return interp(vals, x); };
  return t;
}

double nmse(std::span<const double> approx, std::span<const double> truth) {
  if (approx.size() != truth.size()) throw Error(ErrorKind::shape, "curves differ in length");
  const std::size_t n = truth.size();
  if (n < 2) throw Error(ErrorKind::parameter, "NMSE needs at least two evaluation points");
  double ma = 0.0, mt = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += approx[i];
    mt += truth[i];
  }
  ma /= static_cast<double>(n);
  mt /= static_cast<double>(n);
  double mse = 0.0, var = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = truth[i] - mt;
    const double d = (approx[i] - ma) - t;
    mse += d * d;
    var += t * t;
  }
  if (!(var > 0.0)) throw Error(ErrorKind::numeric, "NMSE undefined: reference has zero variance");
  return mse / var;
}

double nmse(const EffectCurve& approx, const GroundTruthEffect& truth,
            std::span<const double> eval_points) {
  std::vector<double> a = evaluate_curve(approx, eval_points);
  std::vector<double> t(eval_points.size());
  for (std::size_t i = 0; i < eval_points.size(); ++i) t[i] = truth(eval_points[i]);
  return nmse(a, t);
}

double nmse(const EffectCurve& approx, const GroundTruthEffect& truth) {
  return nmse(approx, truth, approx.grid.edges);
}

double nmse(const EffectCurve& approx, const EffectCurve& reference) {
  std::vector<double> t = evaluate_curve(reference, approx.grid.edges);
  return nmse(approx.centered, t);
}

}  // namespace dale
