#include <doctest.h>

#include <cmath>

#include "../support/reference.hpp"
#include "dale/errors.hpp"
#include "dale/estimators.hpp"
#include "dale/jacobian.hpp"
#include "dale/mlp.hpp"
#include "dale/rng.hpp"

using namespace dale;

namespace {

Dataset uniform_data(std::size_t n, std::size_t d, std::uint64_t seed, double lo = 0.0, double hi = 1.0) {
  Matrix m(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    SplitMix64 rng(seed, i);
    for (std::size_t s = 0; s < d; ++s) m(i, s) = lo + (hi - lo) * rng.uniform();
  }
  return Dataset(std::move(m));
}

// f = sum_s a_s x_s^2 + x_0 x_1
AnalyticModel quad_model(std::vector<double> a) {
  const auto d = a.size();
  return AnalyticModel(
      "quad", d,
      [a](std::span<const double> x) {
        double v = x[0] * x[1];
        for (std::size_t s = 0; s < a.size(); ++s) v += a[s] * x[s] * x[s];
        return v;
      },
      [a](std::span<const double> x, std::span<double> g) {
        for (std::size_t s = 0; s < a.size(); ++s) g[s] = 2 * a[s] * x[s];
        g[0] += x[1];
        g[1] += x[0];
      },
      [a](std::span<const double>, std::size_t l, std::size_t m) {
        if (l == m) return 2 * a[l];
        return (l + m == 1) ? 1.0 : 0.0;
      });
}

}  // namespace

TEST_CASE("DALE agrees with the definition-level reference") {
  const auto X = uniform_data(5000, 3, 1, -2.0, 3.0);
  const auto model = quad_model({0.5, -1.0, 2.0});
  const Matrix J = jacobian_batch(model, X);
  for (std::size_t s = 0; s < 3; ++s) {
    const auto xs = X.column(s);
    const auto js = J.column(s);
    const auto curve = rebin(js, xs, 17, EmptyBinPolicy::interpolate, s);
    const auto expected = ref::accumulate(xs, js, 17);
    REQUIRE(curve.centered.size() == expected.centered.size());
    for (std::size_t j = 0; j < curve.centered.size(); ++j) {
      CHECK(curve.centered[j] == doctest::Approx(expected.centered[j]).epsilon(1e-10));
      CHECK(curve.grid.edges[j] == doctest::Approx(expected.edges[j]).epsilon(1e-12));
    }
    CHECK(curve.counts == expected.counts);
  }
}

TEST_CASE("curve bookkeeping") {
  const auto X = uniform_data(1000, 2, 3);
  const auto model = quad_model({1.0, 0.0});
  const Matrix J = jacobian_batch(model, X);
  const auto c = rebin(J.column(0), X.column(0), 8, EmptyBinPolicy::interpolate, 0);
  CHECK(c.accumulated.front() == 0.0);
  CHECK(c.std_error.front() == 0.0);
  CHECK(c.sample_count() == 1000);
  for (std::size_t k = 0; k < 8; ++k) {
    CHECK(c.bin_effects[k] == doctest::Approx(c.grid.width * c.bin_means[k]));
    CHECK(c.accumulated[k + 1] - c.accumulated[k] == doctest::Approx(c.bin_effects[k]));
    CHECK(c.std_error[k + 1] >= c.std_error[k]);
  }
  // Centering: the data-weighted mean of the mid-bin values vanishes.
  double weighted = 0.0;
  for (std::size_t k = 0; k < 8; ++k) weighted += c.counts[k] * 0.5 * (c.centered[k] + c.centered[k + 1]);
  CHECK(weighted / 1000.0 == doctest::Approx(0.0).epsilon(1e-12).scale(1.0));
}

TEST_CASE("standard error from hand-computed bins") {
  BinStats st;
  st.counts = {4, 1, 0, 9};
  st.variance = {2.0, 0.0, std::nan(""), 9.0};
  const auto g = make_grid(0.0, 2.0, 4);
  const auto se = curve_stderr(st, g);
  CHECK(se[0] == 0.0);
  CHECK(se[1] == doctest::Approx(0.5 * std::sqrt(0.5)));
  CHECK(se[2] == doctest::Approx(se[1]));  // singleton adds nothing
  CHECK(se[3] == doctest::Approx(se[1]));  // empty adds nothing
  CHECK(se[4] == doctest::Approx(0.5 * std::sqrt(0.5 + 1.0)));
}

TEST_CASE("evaluation inside bins uses a partial step") {
  // xs and slopes chosen so each bin has a known mean.
  std::vector<double> xs{0.0, 0.1, 0.3, 0.6, 0.9, 1.0};
  std::vector<double> slopes{1.0, 3.0, 5.0, -2.0, 4.0, 4.0};
  const auto g = make_grid(0.0, 1.0, 2);
  const auto c = dale_first_order(slopes, xs, g);
  CHECK(c.bin_means[0] == doctest::Approx(3.0));
  CHECK(c.bin_means[1] == doctest::Approx(2.0));
  const double cc = c.centering_c;
  CHECK(evaluate_curve_at(c, 0.0).value == doctest::Approx(cc));
  CHECK(evaluate_curve_at(c, 0.2).value == doctest::Approx(0.6 + cc));
  CHECK(evaluate_curve_at(c, 0.5).value == doctest::Approx(1.5 + cc));
  CHECK(evaluate_curve_at(c, 0.75).value == doctest::Approx(1.5 + 0.5 + cc));
  CHECK(evaluate_curve_at(c, 1.0).value == doctest::Approx(2.5 + cc));
  for (std::size_t j = 0; j <= 2; ++j) CHECK(evaluate_curve_at(c, g.edges[j]).value == c.centered[j]);
  CHECK_THROWS_AS(evaluate_curve_at(c, 1.01), Error);
}

TEST_CASE("linear model: DALE and ALE coincide and recover the line") {
  const auto X = uniform_data(2000, 3, 7, -1.0, 4.0);
  const auto model = linear_model({2.0, -0.5, 3.0}, 1.0);
  const auto dale = dale_all_features(model, X, 13);
  const auto ale = ale_all_features(model, X, 13);
  const double w[] = {2.0, -0.5, 3.0};
  for (std::size_t s = 0; s < 3; ++s) {
    for (std::size_t j = 0; j < dale[s].centered.size(); ++j) {
      CHECK(std::abs(dale[s].centered[j] - ale[s].centered[j]) < 1e-10);
      const double rise = dale[s].centered[j] - dale[s].centered[0];
      CHECK(rise == doctest::Approx(w[s] * (dale[s].grid.edges[j] - dale[s].grid.edges[0])).epsilon(1e-10));
    }
    for (double v : dale[s].std_error) CHECK(v == doctest::Approx(0.0).scale(1.0));
  }
}

TEST_CASE("evaluation counts") {
  const auto X = uniform_data(250, 4, 2);
  const MlpModel net({4, 6, 1}, Activation::tanh, 1);

  dale_all_features(net, X, 10);
  CHECK(net.counters().snapshot() == CounterSnapshot{0, 250, 0});
  net.counters().reset();

  ale_all_features(net, X, 10);
  CHECK(net.counters().snapshot() == CounterSnapshot{2 * 250 * 4, 0, 0});
  net.counters().reset();

  const auto g0 = make_grid_for(X.column(0), 5);
  const auto g2 = make_grid_for(X.column(2), 5);
  ale_second_order(net, X, 0, 2, g0, g2);
  CHECK(net.counters().snapshot() == CounterSnapshot{4 * 250, 0, 0});
  net.counters().reset();

  const auto h = hessian_entry_batch(net, X, 0, 2);
  CHECK(net.counters().snapshot() == CounterSnapshot{0, 0, 250});
  net.counters().reset();
  // Building the surface from cached entries costs nothing more.
  dale_second_order(h, X.column(0), X.column(2), g0, g2);
  CHECK(net.counters().snapshot() == CounterSnapshot{});

  pdp(net, X, 0, g0.edges);
  CHECK(net.counters().n_value() == 250 * 6);
  net.counters().reset();
  mplot(net, X, 1, make_grid_for(X.column(1), 5));
  CHECK(net.counters().n_value() == 250);
}

TEST_CASE("rebin equals a direct computation on the same grid") {
  const auto X = uniform_data(1500, 2, 5);
  const MlpModel net({2, 8, 1}, Activation::softplus, 4);
  const Matrix J = jacobian_batch(net, X);
  for (std::size_t K : {5u, 25u, 100u}) {
    const auto a = rebin(J.column(1), X.column(1), K, EmptyBinPolicy::interpolate, 1);
    const auto b = dale_first_order(J.column(1), X.column(1), make_grid_for(X.column(1), K),
                                    EmptyBinPolicy::interpolate, 1);
    CHECK(a.centered == b.centered);
    CHECK(a.std_error == b.std_error);
  }
}

TEST_CASE("empty bins follow the policy") {
  std::vector<double> xs{0.0, 0.05, 0.95, 1.0};
  std::vector<double> js{1.0, 1.0, 3.0, 3.0};
  const auto g = make_grid(0.0, 1.0, 4);
  const auto c = dale_first_order(js, xs, g, EmptyBinPolicy::interpolate);
  CHECK(c.flags[1] == BinFlag::filled);
  CHECK(c.bin_means[1] == doctest::Approx(1.0 + 2.0 / 3.0));
  CHECK(c.counts[1] == 0);
  CHECK_THROWS_AS(dale_first_order(js, xs, g, EmptyBinPolicy::fail), Error);
  const auto z = dale_first_order(js, xs, g, EmptyBinPolicy::zero);
  CHECK(z.accumulated[2] == doctest::Approx(z.accumulated[1]));
}

TEST_CASE("estimator input validation") {
  const auto X = uniform_data(10, 2, 1);
  const auto model = linear_model({1.0, 1.0});
  auto kind = [](auto f) {
    try {
      f();
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::usage;
  };
  CHECK(kind([&] { ale_first_order(model, X, 5, make_grid(0, 1, 2)); }) == ErrorKind::parameter);
  CHECK(kind([&] { ale_first_order(linear_model({1.0}), X, 0, make_grid(0, 1, 2)); }) == ErrorKind::shape);
  CHECK(kind([&] { ale_first_order(model, Dataset(Matrix(0, 2)), 0, make_grid(0, 1, 2)); }) ==
        ErrorKind::empty_input);
  CHECK(kind([&] { pdp(model, X, 0, std::vector<double>{5.0}); }) == ErrorKind::parameter);
  CHECK(kind([&] { dale_first_order(std::vector<double>{1.0}, X.column(0), make_grid(0, 1, 2)); }) ==
        ErrorKind::shape);
  // A grid narrower than the data cannot place every sample.
  CHECK(kind([&] { ale_first_order(model, X, 0, make_grid(0.4, 0.5, 2)); }) == ErrorKind::allocation);
}

TEST_CASE("bilinear model: second-order surfaces are exact") {
  const auto X = uniform_data(3000, 3, 11, 0.0, 2.0);
  const auto model = bilinear_model(3, 0, 1);
  const auto gl = make_grid_for(X.column(0), 6);
  const auto gm = make_grid_for(X.column(1), 4);
  const auto h = hessian_entry_batch(model, X, 0, 1);
  const auto d = dale_second_order(h, X.column(0), X.column(1), gl, gm, EmptyBinPolicy::interpolate, 0, 1);
  const auto a = ale_second_order(model, X, 0, 1, gl, gm);
  for (std::size_t i = 0; i <= 6; ++i) {
    for (std::size_t j = 0; j <= 4; ++j) {
      const double expect = (gl.edges[i] - gl.edges[0]) * (gm.edges[j] - gm.edges[0]);
      CHECK(d.accumulated(i, j) == doctest::Approx(expect).epsilon(1e-10));
      CHECK(a.accumulated(i, j) == doctest::Approx(expect).epsilon(1e-9));
    }
  }
  const double xl = 0.77, xm = 1.31;
  CHECK(evaluate_surface_at(d, xl, xm) ==
        doctest::Approx((xl - gl.edges[0]) * (xm - gm.edges[0]) + d.centering_c).epsilon(1e-10));
  // Count-weighted mean of the cell-centre values is zero.
  double weighted = 0.0;
  for (std::size_t p = 0; p < 6; ++p)
    for (std::size_t q = 0; q < 4; ++q)
      weighted += d.counts[p * 4 + q] * 0.25 *
                  (d.centered(p, q) + d.centered(p + 1, q) + d.centered(p, q + 1) + d.centered(p + 1, q + 1));
  CHECK(weighted / 3000.0 == doctest::Approx(0.0).scale(1.0));
  CHECK_THROWS_AS(ale_second_order(model, X, 1, 1, gm, gm), Error);
}

TEST_CASE("PDP and MPlot on a separable model") {
  const auto X = uniform_data(4000, 2, 13);
  const auto model = linear_model({1.0, 2.0});
  const auto g = make_grid_for(X.column(0), 4);
  const auto p = pdp(model, X, 0, g.edges);
  double mean_x2 = 0.0;
  for (double v : X.column(1)) mean_x2 += v / 4000.0;
  for (std::size_t j = 0; j < p.xs.size(); ++j) CHECK(p.values[j] == doctest::Approx(p.xs[j] + 2 * mean_x2));
  const auto mp = mplot(model, X, 0, g);
  CHECK(mp.xs.size() == 4);
  CHECK(mp.counts.size() == 4);
  CHECK(mp.xs[0] == doctest::Approx(g.center(0)));
}
