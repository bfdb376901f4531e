#include "doctest.h"

#include <cmath>
#include <vector>

#include "bench.hpp"

using namespace hds;
using bench::FnId;

namespace {

std::vector<double> ones(int d) { return std::vector<double>(d, 1.0); }
std::vector<double> zeros(int d) { return std::vector<double>(d, 0.0); }

double eval(const char* id, const std::vector<double>& x, bench::EvalOptions opt = {}) {
  return bench::evaluate(bench::find(id), x, opt);
}

}  // namespace

TEST_CASE("registry lists the twelve functions with their intervals") {
  const auto& fns = bench::registry();
  REQUIRE(fns.size() == 12);

  auto expect = [&](const char* id, double lo, double hi, int min_d) {
    const auto& f = bench::find(id);
    CHECK(f.id == id);
    CHECK(f.lo == lo);
    CHECK(f.hi == hi);
    CHECK(f.min_d == min_d);
  };
  expect("griewank", -600.0, 600.0, 1);
  expect("levy", -10.0, 10.0, 1);
  expect("weierstrass", -1.0, 1.0, 1);
  expect("bent_cigar", -10.0, 10.0, 1);
  expect("rotated_hyper_ellipsoid", -5.0, 5.0, 1);
  expect("rosenbrock", -10.0, 10.0, 2);
  expect("hgbat", -100.0, 100.0, 1);
  expect("sum_squares", -10.0, 10.0, 1);
  expect("happycat", -100.0, 100.0, 1);
  expect("dixon_price", -10.0, 10.0, 1);
  expect("shan_wang", 0.0, 1.0, 2);
  expect("expanded_griewank_rosenbrock", -1.0, 1.0, 2);
}

TEST_CASE("find rejects unknown ids, evaluate rejects short inputs") {
  CHECK_THROWS_AS(bench::find("not_a_function"), Error);
  CHECK_THROWS_AS(eval("rosenbrock", {1.0}), Error);
  CHECK_THROWS_AS(eval("shan_wang", {0.5}), Error);
  CHECK_THROWS_AS(eval("expanded_griewank_rosenbrock", {0.5}), Error);
  CHECK_NOTHROW(eval("griewank", {0.5}));
}

TEST_CASE("griewank closed-form values") {
  CHECK(eval("griewank", zeros(324)) == doctest::Approx(0.0).epsilon(1e-12));
  // d=1 at the domain edge: 600^2/4000 - cos(600) + 1
  CHECK(eval("griewank", {600.0}) ==
        doctest::Approx(90.0 - std::cos(600.0) + 1.0).epsilon(1e-12));
  // d=2: sum/4000 - cos(x1)cos(x2/sqrt(2)) + 1
  const double want =
      (9.0 + 16.0) / 4000.0 - std::cos(3.0) * std::cos(4.0 / std::sqrt(2.0)) + 1.0;
  CHECK(eval("griewank", {3.0, 4.0}) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("levy closed-form values") {
  CHECK(eval("levy", ones(100)) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(eval("levy", {0.0}) == doctest::Approx(1.0).epsilon(1e-12));
  const double s = std::sin(3.0 * M_PI * 2.0);
  CHECK(eval("levy", {2.0}) == doctest::Approx(1.0 + s * s).epsilon(1e-12));
}

TEST_CASE("weierstrass is exactly zero at the origin") {
  CHECK(eval("weierstrass", zeros(1)) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(eval("weierstrass", zeros(324)) == doctest::Approx(0.0).epsilon(1e-12));
  // independent summation at a single nonzero point
  double s = 0.0, centre = 0.0;
  for (int k = 0; k <= 20; ++k) {
    const double ak = std::pow(0.5, k), bk = std::pow(3.0, k);
    s += ak * std::cos(2.0 * M_PI * bk * (0.25 + 0.5));
    centre += ak * std::cos(M_PI * bk);
  }
  CHECK(eval("weierstrass", {0.25}) == doctest::Approx(s - centre).epsilon(1e-10));
}

TEST_CASE("bent cigar weights the tail by 1e6") {
  std::vector<double> e1 = zeros(10), e2 = zeros(10);
  e1[0] = 1.0;
  e2[1] = 1.0;
  CHECK(eval("bent_cigar", e1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(eval("bent_cigar", e2) == doctest::Approx(1.0e6).epsilon(1e-12));
  CHECK(eval("bent_cigar", {2.0, 3.0, 4.0}) ==
        doctest::Approx(4.0 + 1.0e6 * 25.0).epsilon(1e-12));
}

TEST_CASE("rotated hyper-ellipsoid nests prefix sums") {
  for (int d : {1, 5, 17}) {
    CHECK(eval("rotated_hyper_ellipsoid", ones(d)) ==
          doctest::Approx(d * (d + 1) / 2.0).epsilon(1e-12));
  }
  // d=3 by hand: x1^2 + (x1^2+x2^2) + (x1^2+x2^2+x3^2)
  CHECK(eval("rotated_hyper_ellipsoid", {1.0, 2.0, 3.0}) ==
        doctest::Approx(1.0 + 5.0 + 14.0).epsilon(1e-12));
}

TEST_CASE("rosenbrock vanishes at the all-ones point") {
  CHECK(eval("rosenbrock", ones(2)) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(eval("rosenbrock", ones(324)) == doctest::Approx(0.0).epsilon(1e-12));
  // d=2 by hand with the x_i^2 - x_{i+1} coupling
  const double t = 4.0 - 3.0;
  CHECK(eval("rosenbrock", {2.0, 3.0}) ==
        doctest::Approx(100.0 * t * t + 1.0).epsilon(1e-12));
}

TEST_CASE("hgbat equals 2 at the all-ones point") {
  for (int d : {1, 3, 324}) CHECK(eval("hgbat", ones(d)) == doctest::Approx(2.0).epsilon(1e-12));
  // d=2 by hand
  const double s1 = 3.0, s2 = 5.0;
  const double want = std::sqrt(std::fabs(s2 * s2 - s1 * s1)) + (0.5 * s2 + s1) / 2.0 + 0.5;
  CHECK(eval("hgbat", {1.0, 2.0}) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("sum squares weights coordinates by index") {
  for (int d : {1, 7, 324})
    CHECK(eval("sum_squares", ones(d)) == doctest::Approx(d * (d + 1) / 2.0).epsilon(1e-12));
  CHECK(eval("sum_squares", {3.0, 2.0}) == doctest::Approx(9.0 + 8.0).epsilon(1e-12));
}

TEST_CASE("happycat coefficient is 0.45 by default and 0.5 under the alternate reading") {
  for (int d : {1, 5, 324})
    CHECK(eval("happycat", ones(d)) == doctest::Approx(1.95).epsilon(1e-12));
  bench::EvalOptions cec;
  cec.happycat_cec = true;
  CHECK(eval("happycat", ones(5), cec) == doctest::Approx(2.0).epsilon(1e-12));
  // fourth-root shell distance term
  const double want = std::pow(std::fabs(4.0 - 1.0), 0.25) + (0.45 * 4.0 + 2.0) / 1.0 + 0.5;
  CHECK(eval("happycat", {2.0}) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("dixon-price default form keeps the full shifted-square sum") {
  for (int d : {2, 5, 324})
    CHECK(eval("dixon_price", ones(d)) == doctest::Approx(d * (d - 1) / 2.0).epsilon(1e-12));
  bench::EvalOptions std_form;
  std_form.dixon_price_standard = true;
  for (int d : {2, 5})
    CHECK(eval("dixon_price", ones(d), std_form) ==
          doctest::Approx(d * (d + 1) / 2.0 - 1.0).epsilon(1e-12));
  // d=2 by hand, default form: (x1-1)^2 + (x2-1)^2 + 1*(2 x2^2 - x1)^2
  CHECK(eval("dixon_price", {3.0, 2.0}) ==
        doctest::Approx(4.0 + 1.0 + (8.0 - 3.0) * (8.0 - 3.0)).epsilon(1e-12));
}

TEST_CASE("shan-wang pairwise powers") {
  CHECK(eval("shan_wang", zeros(5)) == doctest::Approx(0.0).epsilon(1e-12));
  for (int d : {2, 7, 324})
    CHECK(eval("shan_wang", ones(d)) == doctest::Approx(2.0 * (d - 1)).epsilon(1e-12));
  // d=2 by hand: (x1^2)^(x2^2+1) + (x2^2)^(x1^2+1)
  const double a = 0.5, b = 0.8;
  const double want = std::pow(a * a, b * b + 1.0) + std::pow(b * b, a * a + 1.0);
  CHECK(eval("shan_wang", {a, b}) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("expanded griewank-rosenbrock closes the cycle") {
  CHECK(eval("expanded_griewank_rosenbrock", ones(2)) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(eval("expanded_griewank_rosenbrock", ones(324)) == doctest::Approx(0.0).epsilon(1e-12));
  // d=2 by hand, both orientations of the pair appear
  auto g1 = [](double t) { return t * t / 4000.0 - std::cos(t) + 1.0; };
  auto r2 = [](double u, double v) {
    const double t = u * u - v;
    return 100.0 * t * t + (u - 1.0) * (u - 1.0);
  };
  const double x1 = 0.3, x2 = -0.7;
  CHECK(eval("expanded_griewank_rosenbrock", {x1, x2}) ==
        doctest::Approx(g1(r2(x1, x2)) + g1(r2(x2, x1))).epsilon(1e-12));
}
