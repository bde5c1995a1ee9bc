#include <doctest.h>

#include <cmath>
#include <sstream>

#include "dale/csv.hpp"
#include "dale/errors.hpp"
#include "dale/finite_diff.hpp"
#include "dale/jacobian.hpp"
#include "dale/rng.hpp"
#include "dale/synthdata.hpp"

using namespace dale;

namespace {

// Central-difference check at random points kept away from the branch
// boundaries, where the models are smooth.
template <typename Keep>
void check_gradient(const DifferentiableModel& m, const Dataset& X, Keep keep) {
  std::size_t checked = 0;
  for (std::size_t i = 0; i < X.size() && checked < 100; ++i) {
    const auto x = X.row(i);
    if (!keep(x)) continue;
    ++checked;
    const auto g = m.gradient(x);
    const auto fd = finite_diff_gradient([&](std::span<const double> p) { return m.value(p); }, x, 1e-6);
    for (std::size_t s = 0; s < m.dim(); ++s) CHECK(g[s] == doctest::Approx(fd[s]).epsilon(1e-5).scale(1.0));
    for (std::size_t l = 0; l < m.dim(); ++l) {
      for (std::size_t k = 0; k < m.dim(); ++k) {
        std::vector<double> up(x.begin(), x.end()), dn(x.begin(), x.end());
        up[k] += 1e-5;
        dn[k] -= 1e-5;
        const double num = (m.gradient(up)[l] - m.gradient(dn)[l]) / 2e-5;
        CHECK(m.second_derivative(x, l, k) == doctest::Approx(num).epsilon(1e-5).scale(1.0));
      }
    }
  }
  CHECK(checked == 100);
}

Dataset scattered(std::size_t n, std::size_t d, double lo, double hi, std::uint64_t seed) {
  Matrix m(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    SplitMix64 r(seed, i);
    for (std::size_t s = 0; s < d; ++s) m(i, s) = lo + (hi - lo) * r.uniform();
  }
  return Dataset(std::move(m));
}

}  // namespace

TEST_CASE("toy and ood generators put x2 on the diagonal") {
  const auto toy = gen_toy(500, 1);
  CHECK(toy.names() == std::vector<std::string>{"x1", "x2"});
  for (std::size_t i = 0; i < toy.size(); ++i) {
    CHECK(toy(i, 0) == toy(i, 1));
    CHECK(toy(i, 0) >= 0.0);
    CHECK(toy(i, 0) < 1.0);
  }
  const auto ood = gen_ood_demo(500, 1);
  for (std::size_t i = 0; i < ood.size(); ++i) {
    CHECK(ood(i, 0) == ood(i, 1));
    CHECK(ood(i, 0) < 10.0);
  }
  CHECK(ood.max(0) > 9.0);
}

TEST_CASE("generators are pure functions of their arguments") {
  CHECK(gen_case2(300, 4).values() == gen_case2(300, 4).values());
  CHECK(gen_case1(50, 3, 9).values() == gen_case1(50, 3, 9).values());
  CHECK(!(gen_case1(50, 3, 9).values() == gen_case1(50, 3, 10).values()));
  // Row i does not depend on N.
  const auto a = gen_case2(100, 7), b = gen_case2(40, 7);
  for (std::size_t i = 0; i < 40; ++i)
    for (std::size_t s = 0; s < 3; ++s) CHECK(a(i, s) == b(i, s));
}

TEST_CASE("case1 entries look standard normal") {
  const auto X = gen_case1(20000, 3, 2);
  for (std::size_t s = 0; s < 3; ++s) {
    double m = 0, v = 0;
    for (double x : X.column(s)) m += x / 20000.0;
    for (double x : X.column(s)) v += (x - m) * (x - m) / 19999.0;
    CHECK(std::abs(m) < 0.03);
    CHECK(v == doctest::Approx(1.0).epsilon(0.04));
  }
}

TEST_CASE("case2 data: clustered x1, x2 close to x1, wide x3") {
  const Case2Params p;
  const auto X = gen_case2(20000, 3, p);
  std::vector<std::size_t> near(p.centers.size(), 0);
  double r_var = 0.0, x3_var = 0.0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    CHECK(X(i, 0) >= p.lo);
    CHECK(X(i, 0) <= p.hi);
    for (std::size_t c = 0; c < p.centers.size(); ++c)
      if (std::abs(X(i, 0) - p.centers[c]) < 0.5) ++near[c];
    r_var += std::pow(X(i, 1) - X(i, 0), 2) / 20000.0;
    x3_var += X(i, 2) * X(i, 2) / 20000.0;
  }
  std::size_t total = 0;
  for (auto n : near) {
    CHECK(n > 3000);
    total += n;
  }
  CHECK(total > 19000);  // about 95% within two cluster sd of a center
  CHECK(std::sqrt(r_var) == doctest::Approx(p.sigma2).epsilon(0.03));
  CHECK(x3_var == doctest::Approx(p.sigma3_sq).epsilon(0.04));

  Case2Params bad = p;
  bad.centers.clear();
  CHECK_THROWS_AS(gen_case2(10, 0, bad), Error);
}

TEST_CASE("model values at hand-picked points") {
  const auto toy = toy_model();
  CHECK(toy.value(std::vector<double>{0.2, 0.3}) == doctest::Approx(0.5));
  CHECK(toy.value(std::vector<double>{0.7, 0.6}) == 0.0);

  const auto ood = ood_model(100.0);
  CHECK(ood.value(std::vector<double>{2.0, 2.2}) == doctest::Approx(4.4));
  CHECK(ood.value(std::vector<double>{2.0, 1.0}) == doctest::Approx(2.0 + 25.0));
  CHECK(ood.value(std::vector<double>{1.0, 2.0}) == doctest::Approx(2.0 - 25.0));
  CHECK_THROWS_AS(ood_model(0.0), Error);

  const auto c2 = case2_model(0.5, 10.0);
  CHECK(c2.value(std::vector<double>{1.0, 1.2, 3.0}) == doctest::Approx(1.2 + 3.0));
  CHECK(c2.value(std::vector<double>{2.0, 1.0, 0.0}) == doctest::Approx(2.0 - 10.0 * 0.75));
  CHECK(c2.value(std::vector<double>{1.0, 2.0, 0.0}) == doctest::Approx(2.0 + 10.0 * 0.75));
}

TEST_CASE("models are continuous across their branch boundaries") {
  const auto ood = ood_model();
  const auto c2 = case2_model();
  for (double x : {0.7, 3.0, 8.1}) {
    for (double side : {-1.0, 1.0}) {
      const double b = x - side * 0.5;
      CHECK(ood.value(std::vector<double>{x, b - 1e-9}) ==
            doctest::Approx(ood.value(std::vector<double>{x, b + 1e-9})).epsilon(1e-7));
      CHECK(c2.value(std::vector<double>{x, b - 1e-9, 1.0}) ==
            doctest::Approx(c2.value(std::vector<double>{x, b + 1e-9, 1.0})).epsilon(1e-7));
    }
  }
  const auto toy = toy_model();
  CHECK(toy.value(std::vector<double>{0.4, 0.6 - 1e-12}) == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("analytic derivatives match finite differences") {
  const auto pts2 = scattered(400, 2, 0.0, 1.0, 21);
  check_gradient(toy_model(), pts2, [](auto x) { return std::abs(x[0] + x[1] - 1.0) > 1e-3; });

  const auto ood_pts = scattered(400, 2, 0.0, 3.0, 22);
  check_gradient(ood_model(), ood_pts, [](auto x) { return std::abs(std::abs(x[0] - x[1]) - 0.5) > 1e-3; });

  const auto c2_pts = scattered(400, 3, 0.0, 2.0, 23);
  check_gradient(case2_model(), c2_pts, [](auto x) { return std::abs(std::abs(x[0] - x[1]) - 0.5) > 1e-3; });
}

TEST_CASE("inside the band the x1 derivative is exactly x2 + x3") {
  const auto X = gen_case2(2000, 5);
  const auto J = jacobian_batch(case2_model(), X);
  std::size_t inside = 0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    if (std::abs(X(i, 0) - X(i, 1)) >= 0.5) continue;
    ++inside;
    CHECK(J(i, 0) == X(i, 1) + X(i, 2));
    CHECK(J(i, 2) == X(i, 0));
  }
  CHECK(inside > 1900);
}

TEST_CASE("conditional samplers fix the conditioning coordinate") {
  SplitMix64 rng(3);
  Matrix out;
  case2_conditional_sampler()(4.2, 10, rng, out);
  CHECK(out.rows() == 10);
  CHECK(out.cols() == 3);
  for (std::size_t i = 0; i < 10; ++i) CHECK(out(i, 0) == 4.2);
  // Antithetic pairs mirror the noise.
  for (std::size_t i = 0; i + 1 < 10; i += 2) {
    CHECK(out(i, 2) == -out(i + 1, 2));
    CHECK(out(i, 1) - 4.2 == doctest::Approx(4.2 - out(i + 1, 1)));
  }
  toy_conditional_sampler()(0.3, 4, rng, out);
  for (std::size_t i = 0; i < 4; ++i) CHECK(out(i, 1) == 0.3);
}

TEST_CASE("generate dispatch and csv round trip") {
  GeneratorSpec spec;
  spec.name = "case1";
  spec.N = 25;
  spec.D = 4;
  spec.seed = 8;
  const auto X = generate(spec);
  CHECK(X.dim() == 4);
  std::stringstream ss;
  write_csv(ss, X);
  const auto back = parse_csv(ss);
  CHECK(back.values() == X.values());
  CHECK(back.names() == X.names());

  spec.name = "nope";
  try {
    generate(spec);
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::usage);
  }
  spec.name = "case1";
  spec.D = 0;
  CHECK_THROWS_AS(generate(spec), Error);
}
