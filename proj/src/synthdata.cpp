#include "dale/synthdata.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "dale/errors.hpp"
#include "dale/rng.hpp"

namespace dale {
namespace {

void require_rows(std::size_t N) {
  if (N < 1) throw Error(ErrorKind::parameter, "generator needs N >= 1");
}

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

void check_params(const Case2Params& p) {
  if (!(p.tau > 0.0)) throw Error(ErrorKind::parameter, "tau must be positive");
  if (!(p.sigma2 >= 0.0) || !(p.sigma3_sq >= 0.0) || !(p.cluster_sigma > 0.0)) {
    throw Error(ErrorKind::parameter, "case2 spreads must be non-negative");
  }
  if (p.centers.empty()) throw Error(ErrorKind::parameter, "case2 needs at least one cluster center");
  if (!(p.hi > p.lo)) throw Error(ErrorKind::parameter, "case2 truncation range is empty");
}

}  // namespace

Dataset gen_toy(std::size_t N, std::uint64_t seed) {
  require_rows(N);
  Matrix m(N, 2);
  for (std::size_t i = 0; i < N; ++i) {
    SplitMix64 rng(seed, i);
    m(i, 0) = rng.uniform();
    m(i, 1) = m(i, 0);
  }
  return Dataset(std::move(m));
}

AnalyticModel toy_model() {
  return AnalyticModel(
      "toy", 2,
      [](std::span<const double> x) { return x[0] + x[1] <= 1.0 ? 1.0 - x[0] - x[1] : 0.0; },
      [](std::span<const double> x, std::span<double> g) {
        const double v = x[0] + x[1] <= 1.0 ? -1.0 : 0.0;
        g[0] = v;
        g[1] = v;
      },
      [](std::span<const double>, std::size_t, std::size_t) { return 0.0; });
}

ConditionalSampler toy_conditional_sampler() {
  return [](double z, std::size_t n, SplitMix64&, Matrix& out) {
    out = Matrix(n, 2);
    for (std::size_t i = 0; i < n; ++i) {
      out(i, 0) = z;
      out(i, 1) = z;
    }
  };
}

Dataset gen_ood_demo(std::size_t N, std::uint64_t seed) {
  require_rows(N);
  Matrix m(N, 2);
  for (std::size_t i = 0; i < N; ++i) {
    SplitMix64 rng(seed, i);
    m(i, 0) = 10.0 * rng.uniform();
    m(i, 1) = m(i, 0);
  }
  return Dataset(std::move(m));
}

AnalyticModel ood_model(double gamma) {
  if (!(gamma > 0.0)) throw Error(ErrorKind::parameter, "gamma must be positive");
  return AnalyticModel(
      "ood-demo", 2,
      [gamma](std::span<const double> x) {
        const double d = x[0] - x[1];
        const double a = std::abs(d) - 0.5;
        return x[0] * x[1] + (a >= 0.0 ? gamma * sign(d) * a * a : 0.0);
      },
      [gamma](std::span<const double> x, std::span<double> g) {
        const double a = std::abs(x[0] - x[1]) - 0.5;
        const double dh = a >= 0.0 ? 2.0 * gamma * a : 0.0;
        g[0] = x[1] + dh;
        g[1] = x[0] - dh;
      },
      [gamma](std::span<const double> x, std::size_t l, std::size_t m) {
        const double d = x[0] - x[1];
        const double h2 = std::abs(d) >= 0.5 ? 2.0 * gamma * sign(d) : 0.0;
        return l == m ? h2 : 1.0 - h2;
      });
}

Dataset gen_case1(std::size_t N, std::size_t D, std::uint64_t seed) {
  require_rows(N);
  if (D < 1) throw Error(ErrorKind::parameter, "generator needs D >= 1");
  Matrix m(N, D);
  for (std::size_t i = 0; i < N; ++i) {
    SplitMix64 rng(seed, i);
    std::normal_distribution<double> normal;
    for (std::size_t s = 0; s < D; ++s) m(i, s) = normal(rng);
  }
  return Dataset(std::move(m));
}

Dataset gen_case2(std::size_t N, std::uint64_t seed, const Case2Params& p) {
  require_rows(N);
  check_params(p);
  Matrix m(N, 3);
  const double sigma3 = std::sqrt(p.sigma3_sq);
  for (std::size_t i = 0; i < N; ++i) {
    SplitMix64 rng(seed, i);
    std::normal_distribution<double> normal;
    double x1;
    do {
      auto c = static_cast<std::size_t>(rng.uniform() * static_cast<double>(p.centers.size()));
      x1 = p.centers[c] + p.cluster_sigma * normal(rng);
    } while (x1 < p.lo || x1 > p.hi);
    m(i, 0) = x1;
    m(i, 1) = x1 + p.sigma2 * normal(rng);
    m(i, 2) = sigma3 * normal(rng);
  }
  return Dataset(std::move(m));
}

AnalyticModel case2_model(double tau, double alpha) {
  if (!(tau > 0.0)) throw Error(ErrorKind::parameter, "tau must be positive");
  // branch: 0 in band, -1 where g is subtracted, +1 where it is added.
  auto branch = [tau](double r) { return r >= tau ? -1.0 : (r <= -tau ? 1.0 : 0.0); };
  return AnalyticModel(
      "case2", 3,
      [tau, alpha, branch](std::span<const double> x) {
        const double r = x[0] - x[1];
        return x[0] * x[1] + x[0] * x[2] + branch(r) * alpha * (r * r - tau * tau);
      },
      [alpha, branch](std::span<const double> x, std::span<double> g) {
        const double r = x[0] - x[1];
        const double dg = branch(r) * 2.0 * alpha * r;
        g[0] = x[1] + x[2] + dg;
        g[1] = x[0] - dg;
        g[2] = x[0];
      },
      [alpha, branch](std::span<const double> x, std::size_t l, std::size_t m) {
        const double b = branch(x[0] - x[1]) * 2.0 * alpha;
        if (l > m) std::swap(l, m);
        if (l == 0 && m == 0) return b;
        if (l == 1 && m == 1) return b;
        if (l == 0 && m == 1) return 1.0 - b;
        if (l == 0 && m == 2) return 1.0;
        return 0.0;
      });
}

ConditionalSampler case2_conditional_sampler(const Case2Params& p, bool antithetic) {
  check_params(p);
  return [p, antithetic](double z, std::size_t n, SplitMix64& rng, Matrix& out) {
    out = Matrix(n, 3);
    std::normal_distribution<double> normal;
    const double sigma3 = std::sqrt(p.sigma3_sq);
    // Antithetic pairs: rows 2j and 2j + 1 share noise of opposite sign.
    double e2 = 0.0, e3 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (antithetic && i % 2 == 1) {
        e2 = -e2;
        e3 = -e3;
      } else {
        e2 = normal(rng);
        e3 = normal(rng);
      }
      out(i, 0) = z;
      out(i, 1) = z + p.sigma2 * e2;
      out(i, 2) = sigma3 * e3;
    }
  };
}

Dataset generate(const GeneratorSpec& spec) {
  if (spec.name == "toy") return gen_toy(spec.N, spec.seed);
  if (spec.name == "ood-demo") return gen_ood_demo(spec.N, spec.seed);
  if (spec.name == "case1") return gen_case1(spec.N, spec.D, spec.seed);
  if (spec.name == "case2") return gen_case2(spec.N, spec.seed, spec.case2);
  throw Error(ErrorKind::usage, "unknown generator '" + spec.name + "'");
}

void write_csv(std::ostream& out, const Dataset& data) {
  for (std::size_t s = 0; s < data.dim(); ++s) out << (s ? "," : "") << data.name(s);
  out << "\n";
  char buf[32];
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (std::size_t s = 0; s < data.dim(); ++s) {
      std::snprintf(buf, sizeof buf, "%.17g", data(i, s));
      out << (s ? "," : "") << buf;
    }
    out << "\n";
  }
}

void write_csv(const std::string& path, const Dataset& data) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::io, "cannot write '" + path + "'");
  write_csv(out, data);
  if (!out) throw Error(ErrorKind::io, "failed writing '" + path + "'");
}

}  // namespace dale
