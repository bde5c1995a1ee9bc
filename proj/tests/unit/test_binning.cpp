#include <doctest.h>

#include <cmath>
#include <numeric>

#include "dale/binning.hpp"
#include "dale/errors.hpp"
#include "dale/rng.hpp"

using namespace dale;

namespace {

template <typename F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected a dale::Error");
  return ErrorKind::usage;
}

BinStats stats_of(const std::vector<double>& v, const std::vector<std::size_t>& b, std::size_t K) {
  return bin_statistics(v, b, K);
}

}  // namespace

TEST_CASE("grid construction") {
  const auto g = make_grid(0.0, 1.0, 10);
  CHECK(g.edges.size() == 11);
  CHECK(g.edges.front() == 0.0);
  CHECK(g.edges.back() == 1.0);
  CHECK(g.width == doctest::Approx(0.1));
  CHECK(g.center(0) == doctest::Approx(0.05));

  const auto odd = make_grid(0.1, 0.7, 3);
  CHECK(odd.edges.back() == 0.7);

  CHECK(kind_of([] { make_grid(0.0, 1.0, 0); }) == ErrorKind::parameter);
  CHECK(kind_of([] { make_grid(1.0, 1.0, 4); }) == ErrorKind::parameter);
  CHECK(kind_of([] { make_grid(2.0, 1.0, 4); }) == ErrorKind::parameter);
  CHECK(kind_of([] { make_grid_for(std::vector<double>{}, 4); }) == ErrorKind::empty_input);
  CHECK(kind_of([] { make_grid_for(std::vector<double>{3.0, 3.0}, 4); }) == ErrorKind::parameter);
}

TEST_CASE("bin assignment is left-closed with the maximum in the last bin") {
  const auto g = make_grid(0.0, 1.0, 4);
  CHECK(g.bin_of(0.0) == 0);
  CHECK(g.bin_of(0.2499999) == 0);
  CHECK(g.bin_of(0.25) == 1);
  CHECK(g.bin_of(0.75) == 3);
  CHECK(g.bin_of(1.0) == 3);
  try {
    g.bin_of(1.5);
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::allocation);
    CHECK(std::string(e.what()).find("1.5") != std::string::npos);
  }
  CHECK(kind_of([&] { g.bin_of(std::nan("")); }) == ErrorKind::allocation);
}

TEST_CASE("every stored edge opens its own bin") {
  // Awkward ranges where (x - min) / width can round across an edge.
  for (double hi : {0.3, 0.7, 1.1, 9.9, 1e-3}) {
    for (std::size_t K : {3u, 7u, 10u, 49u}) {
      const auto g = make_grid(0.1 * hi, hi, K);
      for (std::size_t k = 0; k < K; ++k) CHECK(g.bin_of(g.edges[k]) == k);
      CHECK(g.bin_of(g.edges[K]) == K - 1);
    }
  }
}

TEST_CASE("bin counts always sum to N") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    SplitMix64 rng(seed);
    const std::size_t n = 1 + rng() % 500;
    std::vector<double> v(n);
    for (auto& x : v) x = std::exp(3.0 * rng.uniform());
    const std::size_t K = 1 + rng() % 40;
    const auto g = make_grid_for(v, K);
    const auto b = assign_bins(v, g);
    const auto st = bin_statistics(v, b, K);
    CHECK(st.total() == n);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(v[i] >= g.edges[b[i]]);
      CHECK((v[i] < g.edges[b[i] + 1] || b[i] == K - 1));
    }
  }
}

TEST_CASE("bin statistics") {
  const auto st = stats_of({1.0, 3.0, 5.0, 10.0}, {0, 0, 0, 2}, 4);
  CHECK(st.counts == std::vector<std::size_t>{3, 0, 1, 0});
  CHECK(st.mean[0] == doctest::Approx(3.0));
  CHECK(st.variance[0] == doctest::Approx(4.0));  // sample variance of {1, 3, 5}
  CHECK(std::isnan(st.mean[1]));
  CHECK(std::isnan(st.variance[1]));
  CHECK(st.variance[2] == 0.0);
  CHECK(st.flags[0] == BinFlag::ok);
  CHECK(st.flags[1] == BinFlag::empty);
  CHECK(st.flags[2] == BinFlag::singleton);
  CHECK(st.empty_mask == std::vector<bool>{false, true, false, true});
  CHECK(st.singleton_mask == std::vector<bool>{false, false, true, false});
  CHECK(kind_of([] { stats_of({1.0}, {5}, 2); }) == ErrorKind::parameter);
  CHECK(kind_of([] { stats_of({1.0, 2.0}, {0}, 2); }) == ErrorKind::shape);
}

TEST_CASE("two-pass variance survives a large offset") {
  std::vector<double> v;
  for (int i = 0; i < 100; ++i) v.push_back(1e9 + (i % 2 ? 1.0 : -1.0));
  const auto st = stats_of(v, std::vector<std::size_t>(100, 0), 1);
  CHECK(st.variance[0] == doctest::Approx(100.0 / 99.0).epsilon(1e-9));
}

TEST_CASE("empty-bin policies") {
  const auto base = stats_of({2.0, 8.0}, {1, 4}, 6);  // bins 0, 2, 3, 5 empty
  const auto interp = fill_empty_bins(base, EmptyBinPolicy::interpolate);
  CHECK(interp.mean[0] == doctest::Approx(2.0));
  CHECK(interp.mean[2] == doctest::Approx(4.0));
  CHECK(interp.mean[3] == doctest::Approx(6.0));
  CHECK(interp.mean[5] == doctest::Approx(8.0));
  CHECK(interp.flags[2] == BinFlag::filled);
  CHECK(interp.counts[2] == 0);
  CHECK(std::isnan(interp.variance[2]));

  const auto zero = fill_empty_bins(base, EmptyBinPolicy::zero);
  CHECK(zero.mean[3] == 0.0);
  CHECK(zero.mean[1] == 2.0);

  try {
    fill_empty_bins(base, EmptyBinPolicy::fail);
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::numeric);
    CHECK(std::string(e.what()).find("bin 0") != std::string::npos);
  }
  const auto none = stats_of({}, {}, 3);
  CHECK(kind_of([&] { fill_empty_bins(none, EmptyBinPolicy::interpolate); }) == ErrorKind::empty_input);

  CHECK(parse_empty_bin_policy("zero") == EmptyBinPolicy::zero);
  CHECK(kind_of([] { parse_empty_bin_policy("magic"); }) == ErrorKind::usage);
}

TEST_CASE("2-D cell filling runs along rows, then across empty rows") {
  // 3 x 3 cells, data in (0,0)=1, (0,2)=3, (2,1)=7; row 1 is empty.
  const auto st = stats_of({1.0, 3.0, 7.0}, {0, 2, 7}, 9);
  const auto f = fill_empty_cells(st, 3, 3, EmptyBinPolicy::interpolate);
  CHECK(f.mean[1] == doctest::Approx(2.0));
  CHECK(f.mean[6] == doctest::Approx(7.0));
  CHECK(f.mean[8] == doctest::Approx(7.0));
  CHECK(f.mean[3] == doctest::Approx(4.0));  // halfway between 1 and 7
  CHECK(f.mean[4] == doctest::Approx(4.5));  // halfway between 2 and 7
  CHECK(f.mean[5] == doctest::Approx(5.0));
  CHECK(kind_of([&] { fill_empty_cells(st, 2, 3, EmptyBinPolicy::zero); }) == ErrorKind::shape);
}
