#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

#include "metrics.hpp"
#include "surrogate.hpp"

using namespace hds;
using surrogate::CnnSurrogate;
using surrogate::CnnSurrogateConfig;

namespace {

// small linear dataset on 4 inputs with per-dimension bounds
doe::Dataset linear_data(int n, unsigned seed) {
  doe::Dataset ds;
  ds.n = n;
  ds.d = 4;
  ds.bounds = {{0.0, 2.0}, {-1.0, 1.0}, {5.0, 9.0}, {-3.0, 0.0}};
  ds.grid_h = 2;
  ds.grid_w = 2;
  ds.seed = seed;
  std::mt19937_64 g(seed);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < 4; ++j) {
      std::uniform_real_distribution<double> u(ds.bounds[j].first, ds.bounds[j].second);
      ds.X.push_back(u(g));
    }
    const double* r = &ds.X[4 * i];
    ds.y.push_back(1.5 * r[0] - 2.0 * r[1] + 0.25 * r[2] + r[3] + 4.0);
  }
  return ds;
}

CnnSurrogateConfig quick_cfg(int epochs = 300) {
  CnnSurrogateConfig cfg;
  cfg.arch = nn::parse_arch("flatten,dense:8,relu,dense:1");
  cfg.train.epochs = epochs;
  cfg.train.batch_size = 16;
  cfg.train.adam.lr = 0.01;
  cfg.train.val_fraction = 0.2;
  cfg.train.patience = 0;
  cfg.train.seed = 11;
  cfg.init_seed = 11;
  return cfg;
}

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name) : path("/tmp/hdsurr_test_" + name) {}
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("default_arch uses pooling only when both grid dims are even") {
  const auto even = surrogate::default_arch(18, 18);
  bool has_pool = false;
  for (const auto& l : even)
    if (l.kind == nn::LayerKind::avg_pool) has_pool = true;
  CHECK(has_pool);

  const auto odd = surrogate::default_arch(10, 15);
  for (const auto& l : odd) CHECK(l.kind != nn::LayerKind::avg_pool);

  // both end in a scalar dense layer
  CHECK(even.back().kind == nn::LayerKind::dense);
  CHECK(even.back().width == 1);
  CHECK(odd.back().kind == nn::LayerKind::dense);
  CHECK(odd.back().width == 1);
}

TEST_CASE("to_grid scales inputs to [-1,1] and zero-pads the tail") {
  doe::Dataset ds = linear_data(20, 1);
  CnnSurrogate s = CnnSurrogate::fit(quick_cfg(2), ds);

  // bounds midpoints map to 0, endpoints to -1 and 1
  std::vector<double> mid{1.0, 0.0, 7.0, -1.5};
  nn::Tensor g = s.to_grid(mid, 1);
  REQUIRE(g.shape == std::vector<int>({1, 1, 2, 2}));
  for (int k = 0; k < 4; ++k) CHECK(g.data[k] == doctest::Approx(0.0).epsilon(1e-14));

  std::vector<double> lo{0.0, -1.0, 5.0, -3.0}, hi{2.0, 1.0, 9.0, 0.0};
  g = s.to_grid(lo, 1);
  for (int k = 0; k < 4; ++k) CHECK(g.data[k] == doctest::Approx(-1.0).epsilon(1e-14));
  g = s.to_grid(hi, 1);
  for (int k = 0; k < 4; ++k) CHECK(g.data[k] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("padding cells stay zero for non-square dimension counts") {
  doe::Dataset ds = linear_data(20, 2);
  ds.d = 3;  // drop one dimension: grid stays 2x2 with one pad cell
  ds.bounds.pop_back();
  std::vector<double> X;
  for (int i = 0; i < ds.n; ++i)
    for (int j = 0; j < 3; ++j) X.push_back(ds.X[4 * i + j]);
  ds.X = std::move(X);

  CnnSurrogate s = CnnSurrogate::fit(quick_cfg(2), ds);
  std::vector<double> pt{0.3, 0.4, 6.0};
  nn::Tensor g = s.to_grid(pt, 1);
  REQUIRE(g.shape == std::vector<int>({1, 1, 2, 2}));
  CHECK(g.data[3] == 0.0);
}

TEST_CASE("fit learns an easy linear response well") {
  doe::Dataset ds = linear_data(200, 3);
  nn::TrainResult hist;
  CnnSurrogate s = CnnSurrogate::fit(quick_cfg(), ds, &hist);
  CHECK(hist.epochs_run == 300);
  REQUIRE(s.dim() == 4);
  CHECK_FALSE(s.is_constant());

  doe::Dataset test = linear_data(100, 4);
  const std::vector<double> pred = s.predict_batch(test.X, test.n);
  metrics::Report rep = metrics::report(test.y, pred);
  CHECK(rep.r2 > 0.99);
}

TEST_CASE("predict and predict_batch agree across the chunk boundary") {
  doe::Dataset ds = linear_data(60, 5);
  CnnSurrogate s = CnnSurrogate::fit(quick_cfg(20), ds);
  // 300 rows straddles the fixed predict chunk size
  doe::Dataset big = linear_data(300, 6);
  const std::vector<double> batch = s.predict_batch(big.X, big.n);
  REQUIRE(batch.size() == 300);
  for (int i : {0, 1, 255, 256, 257, 299})
    CHECK(batch[i] == doctest::Approx(s.predict(big.row(i))).epsilon(1e-12));
}

TEST_CASE("constant labels produce a constant model") {
  doe::Dataset ds = linear_data(30, 7);
  for (double& v : ds.y) v = 42.0;
  CnnSurrogate s = CnnSurrogate::fit(quick_cfg(2), ds);
  CHECK(s.is_constant());
  CHECK(s.predict(std::vector<double>{0.5, 0.5, 6.0, -1.0}) == 42.0);

  TempFile tmp("const_surr.json");
  s.save(tmp.path);
  CnnSurrogate back = CnnSurrogate::load(tmp.path);
  CHECK(back.is_constant());
  CHECK(back.predict(std::vector<double>{1.0, 0.0, 8.0, -2.0}) == 42.0);
}

TEST_CASE("surrogate json round-trip preserves predictions bit-exactly") {
  doe::Dataset ds = linear_data(80, 8);
  CnnSurrogate s = CnnSurrogate::fit(quick_cfg(50), ds);
  TempFile tmp("surr_roundtrip.json");
  s.save(tmp.path);
  CnnSurrogate back = CnnSurrogate::load(tmp.path);
  CHECK(back.dim() == s.dim());
  CHECK(back.grid() == s.grid());
  CHECK(back.to_json() == s.to_json());

  doe::Dataset test = linear_data(40, 9);
  const auto p0 = s.predict_batch(test.X, test.n);
  const auto p1 = back.predict_batch(test.X, test.n);
  for (int i = 0; i < 40; ++i) CHECK(p0[i] == p1[i]);
}

TEST_CASE("degenerate bounds normalize to zero instead of dividing by zero") {
  doe::Dataset ds = linear_data(30, 10);
  // pin dimension 2 to a point
  for (int i = 0; i < ds.n; ++i) ds.X[4 * i + 2] = 7.0;
  ds.bounds[2] = {7.0, 7.0};
  CnnSurrogate s = CnnSurrogate::fit(quick_cfg(2), ds);
  std::vector<double> pt{1.0, 0.0, 7.0, -1.0};
  nn::Tensor g = s.to_grid(pt, 1);
  CHECK(g.data[2] == 0.0);
  CHECK(std::isfinite(s.predict(pt)));
}

TEST_CASE("fit and predict validate dimensions") {
  doe::Dataset ds = linear_data(20, 12);
  CnnSurrogate s = CnnSurrogate::fit(quick_cfg(2), ds);
  CHECK_THROWS_AS(s.predict(std::vector<double>{1.0, 2.0}), Error);
  CHECK_THROWS_AS(CnnSurrogate::load("/tmp/hdsurr_missing_model.json"), Error);

  doe::Dataset empty;
  CHECK_THROWS_AS(CnnSurrogate::fit(quick_cfg(2), empty), Error);
}
