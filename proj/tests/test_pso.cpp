#include "doctest.h"

#include <cmath>
#include <vector>

#include "bench.hpp"
#include "pso.hpp"

using namespace hds;

namespace {

double sphere(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

}  // namespace

TEST_CASE("pso solves a 2-d sphere to 1e-4") {
  pso::PsoConfig cfg;
  cfg.population = 30;
  cfg.iterations = 150;
  cfg.seed = 5;
  const std::vector<std::pair<double, double>> box(2, {-5.0, 5.0});
  pso::PsoResult res = pso::pso_minimize(sphere, box, cfg);
  CHECK(res.best_value <= 1e-4);
  for (double v : res.best_point) CHECK(std::fabs(v) <= 0.1);
  CHECK(res.evaluations == 30 * (150 + 1));
}

TEST_CASE("history is monotone non-increasing and starts after init") {
  pso::PsoConfig cfg;
  cfg.population = 20;
  cfg.iterations = 60;
  cfg.seed = 12;
  const std::vector<std::pair<double, double>> box(4, {-10.0, 10.0});
  pso::PsoResult res =
      pso::pso_minimize([](std::span<const double> x) { return bench::evaluate(bench::find("levy"), x); },
                        box, cfg);
  REQUIRE(res.history.size() == 61);
  for (size_t i = 1; i < res.history.size(); ++i) CHECK(res.history[i] <= res.history[i - 1]);
  CHECK(res.best_value == res.history.back());
}

TEST_CASE("every evaluated point lies inside the box") {
  pso::PsoConfig cfg;
  cfg.population = 15;
  cfg.iterations = 40;
  cfg.seed = 3;
  const std::vector<std::pair<double, double>> box{{-1.0, 2.0}, {3.0, 4.0}, {-7.0, -6.0}};
  bool ok = true;
  auto f = [&](std::span<const double> x) {
    for (size_t j = 0; j < x.size(); ++j)
      if (x[j] < box[j].first || x[j] > box[j].second) ok = false;
    return sphere(x);
  };
  pso::PsoResult res = pso::pso_minimize(f, box, cfg);
  CHECK(ok);
  // optimum of the sphere over this box is at (0, 3, -6)
  CHECK(res.best_point[0] == doctest::Approx(0.0).epsilon(0.05));
  CHECK(res.best_point[1] == doctest::Approx(3.0).epsilon(0.05));
  CHECK(res.best_point[2] == doctest::Approx(-6.0).epsilon(0.05));
}

TEST_CASE("identical seeds give identical runs, different seeds differ") {
  pso::PsoConfig cfg;
  cfg.population = 10;
  cfg.iterations = 25;
  cfg.seed = 44;
  const std::vector<std::pair<double, double>> box(3, {-2.0, 2.0});
  pso::PsoResult a = pso::pso_minimize(sphere, box, cfg);
  pso::PsoResult b = pso::pso_minimize(sphere, box, cfg);
  CHECK(a.best_point == b.best_point);
  CHECK(a.best_value == b.best_value);
  CHECK(a.history == b.history);
  cfg.seed = 45;
  pso::PsoResult c = pso::pso_minimize(sphere, box, cfg);
  CHECK_FALSE(a.history == c.history);
}

TEST_CASE("pso validates its inputs") {
  const std::vector<std::pair<double, double>> box(2, {-1.0, 1.0});
  pso::PsoConfig cfg;
  cfg.population = 0;
  CHECK_THROWS_AS(pso::pso_minimize(sphere, box, cfg), Error);
  cfg.population = 5;
  cfg.iterations = -1;
  CHECK_THROWS_AS(pso::pso_minimize(sphere, box, cfg), Error);
  cfg.iterations = 5;
  const std::vector<std::pair<double, double>> bad{{1.0, -1.0}};
  CHECK_THROWS_AS(pso::pso_minimize(sphere, bad, cfg), Error);
  const std::vector<std::pair<double, double>> none;
  CHECK_THROWS_AS(pso::pso_minimize(sphere, none, cfg), Error);
}

TEST_CASE("rng streams with different tags or indices are decorrelated") {
  auto a = rng::make_stream(7, rng::Stream::sampling);
  auto b = rng::make_stream(7, rng::Stream::pso);
  auto c = rng::make_stream(7, rng::Stream::sampling, 1);
  auto a2 = rng::make_stream(7, rng::Stream::sampling);
  CHECK(a() != b());
  CHECK(a2() == rng::make_stream(7, rng::Stream::sampling)());
  CHECK(rng::make_stream(7, rng::Stream::sampling)() !=
        rng::make_stream(8, rng::Stream::sampling)());
  CHECK(a() != c());

  // uniform01 stays in [0,1) and below() respects its bound
  auto g = rng::make_stream(1, rng::Stream::shuffle);
  for (int i = 0; i < 1000; ++i) {
    const double u = rng::uniform01(g);
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(rng::below(g, 7) < 7u);
  }
}
