#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "doe.hpp"

using namespace hds;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name) : path("/tmp/hdsurr_test_" + name) {}
  ~TempFile() {
    std::remove(path.c_str());
    std::remove((path + ".meta.json").c_str());
  }
};

}  // namespace

TEST_CASE("grid_shape matches a brute-force search") {
  // reference: smallest m >= d that factors as H*W with H <= W <= 2H,
  // preferring the most-square factorization of that m
  auto brute = [](int d) {
    for (int m = d;; ++m) {
      int best_h = 0, best_w = 0;
      for (int h = 1; h * h <= m; ++h) {
        if (m % h != 0) continue;
        const int w = m / h;
        if (w <= 2 * h && (best_h == 0 || w - h < best_w - best_h)) {
          best_h = h;
          best_w = w;
        }
      }
      if (best_h > 0) return std::make_pair(best_h, best_w);
    }
  };
  for (int d = 1; d <= 1000; ++d) CHECK(doe::grid_shape(d) == brute(d));

  CHECK(doe::grid_shape(324) == std::make_pair(18, 18));
  CHECK(doe::grid_shape(100) == std::make_pair(10, 10));
  CHECK(doe::grid_shape(144) == std::make_pair(12, 12));
  CHECK(doe::grid_shape(256) == std::make_pair(16, 16));
  CHECK(doe::grid_shape(784) == std::make_pair(28, 28));
  CHECK(doe::grid_shape(150) == std::make_pair(10, 15));
  CHECK(doe::grid_shape(200) == std::make_pair(10, 20));
  CHECK(doe::grid_shape(250) == std::make_pair(14, 18));
  CHECK(doe::grid_shape(300) == std::make_pair(15, 20));
  CHECK(doe::grid_shape(3) == std::make_pair(2, 2));
  CHECK(doe::grid_shape(1) == std::make_pair(1, 1));
  CHECK_THROWS_AS(doe::grid_shape(0), Error);
}

TEST_CASE("uniform sampling stays in bounds and is seed-deterministic") {
  const auto xs = doe::sample_uniform(200, 3, {-2.0, 5.0}, 42);
  REQUIRE(xs.size() == 600);
  for (double v : xs) {
    CHECK(v >= -2.0);
    CHECK(v < 5.0);
  }
  CHECK(doe::sample_uniform(200, 3, {-2.0, 5.0}, 42) == xs);
  CHECK(doe::sample_uniform(200, 3, {-2.0, 5.0}, 43) != xs);
}

TEST_CASE("uniform sampling mean converges to the interval midpoint") {
  const int n = 100000;
  const auto xs = doe::sample_uniform(n, 1, {0.0, 1.0}, 7);
  double mean = 0.0;
  for (double v : xs) mean += v;
  mean /= n;
  // std of the sample mean is 1/sqrt(12 n) ~ 0.0009; 0.01 is > 10 sigma
  CHECK(std::fabs(mean - 0.5) < 0.01);

  // second moment of U(0,1) is 1/3
  double m2 = 0.0;
  for (double v : xs) m2 += v * v;
  m2 /= n;
  CHECK(std::fabs(m2 - 1.0 / 3.0) < 0.01);
}

TEST_CASE("per-dimension bounds are respected") {
  const std::vector<std::pair<double, double>> b{{0.0, 1.0}, {10.0, 11.0}, {-5.0, -4.0}};
  const auto xs = doe::sample_uniform(50, 3, b, 3);
  for (int i = 0; i < 50; ++i)
    for (int j = 0; j < 3; ++j) {
      CHECK(xs[i * 3 + j] >= b[j].first);
      CHECK(xs[i * 3 + j] < b[j].second);
    }
}

TEST_CASE("latin hypercube puts exactly one sample in each stratum") {
  const int n = 64;
  const auto xs = doe::sample_lhs(n, 4, std::vector<std::pair<double, double>>(4, {2.0, 6.0}), 9);
  for (int j = 0; j < 4; ++j) {
    std::vector<int> count(n, 0);
    for (int i = 0; i < n; ++i) {
      const double u = (xs[i * 4 + j] - 2.0) / 4.0;  // back to [0,1)
      CHECK(u >= 0.0);
      CHECK(u < 1.0);
      ++count[static_cast<int>(u * n)];
    }
    for (int c : count) CHECK(c == 1);
  }
  CHECK(doe::sample_lhs(n, 4, std::vector<std::pair<double, double>>(4, {2.0, 6.0}), 9) == xs);
}

TEST_CASE("build_dataset labels every row with the requested function") {
  const auto& fn = bench::find("sum_squares");
  doe::Dataset ds = doe::build_dataset(fn, 25, 7, 123);
  REQUIRE(ds.n == 25);
  REQUIRE(ds.d == 7);
  REQUIRE(ds.bounds.size() == 7);
  CHECK(ds.fn_id == "sum_squares");
  CHECK(ds.seed == 123);
  // 7 inputs pad up to the 2x4 grid
  CHECK(ds.grid_h == 2);
  CHECK(ds.grid_w == 4);
  for (int i = 0; i < 25; ++i) {
    CHECK(ds.y[i] == bench::evaluate(fn, ds.row(i)));
    for (int j = 0; j < 7; ++j) {
      CHECK(ds.X[i * 7 + j] >= fn.lo);
      CHECK(ds.X[i * 7 + j] < fn.hi);
    }
  }
}

TEST_CASE("dataset csv round-trips losslessly") {
  TempFile tmp("doe_roundtrip.csv");
  const auto& fn = bench::find("griewank");
  doe::Dataset ds = doe::build_dataset(fn, 30, 5, 77, {}, true);
  doe::write_dataset(ds, tmp.path);
  doe::Dataset back = doe::read_dataset(tmp.path);
  CHECK(back.n == ds.n);
  CHECK(back.d == ds.d);
  CHECK(back.X == ds.X);  // %.17g survives the double round-trip bit-exactly
  CHECK(back.y == ds.y);
  CHECK(back.bounds == ds.bounds);
  CHECK(back.grid_h == ds.grid_h);
  CHECK(back.grid_w == ds.grid_w);
  CHECK(back.seed == ds.seed);
  CHECK(back.fn_id == ds.fn_id);
}

TEST_CASE("read_dataset rejects malformed input") {
  CHECK_THROWS_AS(doe::read_dataset("/tmp/hdsurr_does_not_exist.csv"), Error);
}

TEST_CASE("samplers validate their arguments") {
  CHECK_THROWS_AS(doe::sample_uniform(0, 3, {0.0, 1.0}, 1), Error);
  CHECK_THROWS_AS(doe::sample_uniform(3, 0, {0.0, 1.0}, 1), Error);
  CHECK_THROWS_AS(doe::sample_uniform(3, 3, {1.0, 0.0}, 1), Error);  // inverted interval
  const std::vector<std::pair<double, double>> two{{0.0, 1.0}, {0.0, 1.0}};
  CHECK_THROWS_AS(doe::sample_uniform(3, 3, two, 1), Error);  // bounds count mismatch
}
