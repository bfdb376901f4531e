#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "metrics.hpp"

using namespace hds;

namespace {

std::vector<double> randvec(int n, unsigned seed, double lo = -3.0, double hi = 5.0) {
  std::mt19937_64 g(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = u(g);
  return v;
}

}  // namespace

TEST_CASE("worked example: unit-spread labels") {
  // y = [0,2], yhat = [1,1]: mean 1, population std 1, both residuals 1
  std::vector<double> y{0.0, 2.0}, yh{1.0, 1.0};
  CHECK(metrics::raae(y, yh) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(metrics::rmae(y, yh) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(metrics::r2(y, yh) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("worked example: relative error in percent") {
  // ||yhat-y|| / ||y|| = 1/5
  std::vector<double> y{3.0, 4.0}, yh{3.0, 3.0};
  CHECK(metrics::rel_error(y, yh) == doctest::Approx(20.0).epsilon(1e-12));
}

TEST_CASE("perfect prediction scores 1/0/0/0") {
  std::vector<double> y = randvec(50, 11);
  metrics::Report r = metrics::report(y, y);
  CHECK(r.raae == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(r.rmae == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(r.r2 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.error_pct == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(r.n == 50);
}

TEST_CASE("r2 identity: 1 - mse/variance with population denominators") {
  const std::vector<double> y = randvec(101, 3), yh = randvec(101, 4);
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= 101.0;
  double var = 0.0, mse = 0.0;
  for (int i = 0; i < 101; ++i) {
    var += (y[i] - mean) * (y[i] - mean);
    mse += (y[i] - yh[i]) * (y[i] - yh[i]);
  }
  var /= 101.0;
  mse /= 101.0;
  CHECK(metrics::r2(y, yh) == doctest::Approx(1.0 - mse / var).epsilon(1e-12));

  metrics::Report r = metrics::report(y, yh);
  CHECK(r.std_dev == doctest::Approx(std::sqrt(var)).epsilon(1e-12));
  CHECK(r.raae == doctest::Approx(metrics::raae(y, yh)).epsilon(1e-12));
  CHECK(r.rmae == doctest::Approx(metrics::rmae(y, yh)).epsilon(1e-12));
  CHECK(r.r2 == doctest::Approx(metrics::r2(y, yh)).epsilon(1e-12));
  CHECK(r.error_pct == doctest::Approx(metrics::rel_error(y, yh)).epsilon(1e-12));
}

TEST_CASE("raae from first principles") {
  const std::vector<double> y = randvec(64, 7), yh = randvec(64, 8);
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= 64.0;
  double var = 0.0, abs_sum = 0.0, abs_max = 0.0;
  for (int i = 0; i < 64; ++i) {
    var += (y[i] - mean) * (y[i] - mean);
    abs_sum += std::fabs(y[i] - yh[i]);
    abs_max = std::max(abs_max, std::fabs(y[i] - yh[i]));
  }
  const double sd = std::sqrt(var / 64.0);
  CHECK(metrics::raae(y, yh) == doctest::Approx(abs_sum / (64.0 * sd)).epsilon(1e-12));
  CHECK(metrics::rmae(y, yh) == doctest::Approx(abs_max / sd).epsilon(1e-12));
}

TEST_CASE("raae and rmae are invariant to a common affine map") {
  const std::vector<double> y = randvec(40, 21), yh = randvec(40, 22);
  std::vector<double> y2(40), yh2(40);
  const double a = 3.7, b = -11.0;
  for (int i = 0; i < 40; ++i) {
    y2[i] = a * y[i] + b;
    yh2[i] = a * yh[i] + b;
  }
  CHECK(metrics::raae(y2, yh2) == doctest::Approx(metrics::raae(y, yh)).epsilon(1e-10));
  CHECK(metrics::rmae(y2, yh2) == doctest::Approx(metrics::rmae(y, yh)).epsilon(1e-10));
  CHECK(metrics::r2(y2, yh2) == doctest::Approx(metrics::r2(y, yh)).epsilon(1e-10));
}

TEST_CASE("metrics are invariant to a common permutation") {
  std::vector<double> y = randvec(30, 31), yh = randvec(30, 32);
  std::vector<int> idx(30);
  for (int i = 0; i < 30; ++i) idx[i] = i;
  std::shuffle(idx.begin(), idx.end(), std::mt19937_64(5));
  std::vector<double> y2(30), yh2(30);
  for (int i = 0; i < 30; ++i) {
    y2[i] = y[idx[i]];
    yh2[i] = yh[idx[i]];
  }
  CHECK(metrics::raae(y2, yh2) == doctest::Approx(metrics::raae(y, yh)).epsilon(1e-12));
  CHECK(metrics::rmae(y2, yh2) == doctest::Approx(metrics::rmae(y, yh)).epsilon(1e-12));
  CHECK(metrics::r2(y2, yh2) == doctest::Approx(metrics::r2(y, yh)).epsilon(1e-12));
  CHECK(metrics::rel_error(y2, yh2) == doctest::Approx(metrics::rel_error(y, yh)).epsilon(1e-12));
}

TEST_CASE("degenerate inputs are rejected") {
  std::vector<double> c{2.0, 2.0, 2.0}, yh{1.0, 2.0, 3.0};
  CHECK_THROWS_AS(metrics::raae(c, yh), Error);   // zero spread
  CHECK_THROWS_AS(metrics::r2(c, yh), Error);
  std::vector<double> z{0.0, 0.0}, zh{1.0, 1.0};
  CHECK_THROWS_AS(metrics::rel_error(z, zh), Error);  // zero label norm
  std::vector<double> a{1.0}, b2{1.0, 2.0};
  CHECK_THROWS_AS(metrics::report(a, b2), Error);  // length mismatch
  std::vector<double> e;
  CHECK_THROWS_AS(metrics::report(e, e), Error);  // empty
}

TEST_CASE("report json round-trip") {
  const std::vector<double> y = randvec(25, 41), yh = randvec(25, 42);
  metrics::Report r = metrics::report(y, yh);
  metrics::Report back = metrics::report_from_json(metrics::to_json(r));
  CHECK(back.raae == r.raae);
  CHECK(back.rmae == r.rmae);
  CHECK(back.r2 == r.r2);
  CHECK(back.error_pct == r.error_pct);
  CHECK(back.n == r.n);
  CHECK(back.std_dev == r.std_dev);
}

TEST_CASE("format_table mentions every column") {
  metrics::Report r = metrics::report(std::vector<double>{0.0, 2.0}, std::vector<double>{1.0, 1.0});
  const std::string t = metrics::format_table(r);
  for (const char* col : {"RAAE", "RMAE", "R2", "Error"}) CHECK(t.find(col) != std::string::npos);
}
