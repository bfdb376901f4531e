#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include <nlohmann/json.hpp>

#include "network.hpp"

using namespace hds;
using namespace hds::nn;

namespace {

Tensor randt(std::vector<int> shape, unsigned seed) {
  Tensor t(std::move(shape));
  std::mt19937_64 g(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (double& v : t.data) v = u(g);
  return t;
}

}  // namespace

TEST_CASE("forward matches a hand-evaluated tiny net") {
  // 1x3x3 input -> conv 1 filter 2x2 valid -> relu -> flatten -> dense 1
  std::vector<LayerSpec> spec{LayerSpec::conv2d(1, 2, 2), LayerSpec::activation(Activation::relu),
                              LayerSpec::flatten(), LayerSpec::dense(1)};
  Network net(spec, {1, 3, 3}, 0);
  net.weights()[0] = Tensor({1, 1, 2, 2}, {1.0, 2.0, 3.0, 4.0});
  net.biases()[0] = Tensor({1}, {0.5});
  net.weights()[3] = Tensor({1, 4}, {1.0, -1.0, 2.0, 0.5});
  net.biases()[3] = Tensor({1}, {-1.0});

  const std::vector<double> img{0.1, -0.2, 0.3,
                                0.4, 0.5, -0.6,
                                0.7, 0.8, 0.9};
  Tensor x({1, 1, 3, 3}, img);

  // every step written out by hand
  double conv[4];
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      conv[i * 2 + j] = 0.5 + 1.0 * img[i * 3 + j] + 2.0 * img[i * 3 + j + 1] +
                        3.0 * img[(i + 1) * 3 + j] + 4.0 * img[(i + 1) * 3 + j + 1];
  double want = -1.0;
  const double dw[4] = {1.0, -1.0, 2.0, 0.5};
  for (int k = 0; k < 4; ++k) want += dw[k] * std::max(0.0, conv[k]);

  const Tensor& out = net.forward(x);
  REQUIRE(out.shape == std::vector<int>({1, 1}));
  CHECK(out.data[0] == doctest::Approx(want).epsilon(1e-14));
  CHECK(net.predict(x)[0] == doctest::Approx(want).epsilon(1e-14));
}

TEST_CASE("predict agrees with forward on a random net and batch") {
  const auto spec = parse_arch("conv:4:3x3:same,relu,maxpool:2x2,flatten,dense:8,relu,dense:1");
  Network net(spec, {1, 6, 6}, 99);
  const Tensor x = randt({5, 1, 6, 6}, 3);
  const Tensor& out = net.forward(x);
  const std::vector<double> p = net.predict(x);
  REQUIRE(p.size() == 5);
  for (int n = 0; n < 5; ++n) CHECK(p[n] == out.data[n]);
}

TEST_CASE("initialization is deterministic in the seed and bounded per layer") {
  const auto spec = parse_arch("conv:8:3x3:same,relu,flatten,dense:50,relu,dense:1");
  Network a(spec, {2, 5, 5}, 1234);
  Network b(spec, {2, 5, 5}, 1234);
  Network c(spec, {2, 5, 5}, 1235);
  CHECK(a == b);
  CHECK_FALSE(a == c);

  // conv: fans are C*kh*kw and F*kh*kw
  const double conv_lim = std::sqrt(6.0 / (2 * 9 + 8 * 9));
  double max_conv = 0.0;
  for (double v : a.weights()[0].data) {
    CHECK(std::fabs(v) <= conv_lim);
    max_conv = std::max(max_conv, std::fabs(v));
  }
  CHECK(max_conv > 0.5 * conv_lim);  // actually spread over the interval

  // dense 200 -> 50
  const double dense_lim = std::sqrt(6.0 / (200 + 50));
  double mean = 0.0;
  for (double v : a.weights()[3].data) {
    CHECK(std::fabs(v) <= dense_lim);
    mean += v;
  }
  mean /= static_cast<double>(a.weights()[3].size());
  CHECK(std::fabs(mean) < dense_lim / 10.0);

  for (const Tensor& t : a.biases())
    for (double v : t.data) CHECK(v == 0.0);
}

TEST_CASE("parameter_count totals weights and biases") {
  const auto spec = parse_arch("conv:4:3x3:same,relu,flatten,dense:1");
  Network net(spec, {1, 4, 4}, 0);
  // conv: 4*1*3*3 + 4, dense: 1*64 + 1
  CHECK(net.parameter_count() == 36 + 4 + 64 + 1);
}

TEST_CASE("json round-trip is bit-exact") {
  const auto spec = parse_arch("conv:3:3x3:same,relu,avgpool:2x2,flatten,dense:7,relu,dense:1");
  Network net(spec, {1, 6, 6}, 77);
  const std::string js = net.to_json();
  Network back = Network::from_json(js);
  CHECK(back == net);
  CHECK(back.to_json() == js);

  const Tensor x = randt({3, 1, 6, 6}, 8);
  const std::vector<double> p0 = net.predict(x), p1 = back.predict(x);
  for (int n = 0; n < 3; ++n) CHECK(p0[n] == p1[n]);
}

TEST_CASE("from_json rejects tampered payloads") {
  const auto spec = parse_arch("flatten,dense:1");
  Network net(spec, {1, 2, 2}, 3);
  std::string js = net.to_json();
  CHECK_THROWS_AS(Network::from_json("{}"), Error);
  CHECK_THROWS_AS(Network::from_json("not json"), Error);
  // corrupt a weight array length
  nlohmann::json j = nlohmann::json::parse(js);
  bool cut_one = false;
  for (auto& l : j["layers"])
    if (l.contains("w") && !cut_one) {
      l["w"].erase(l["w"].size() - 1);
      cut_one = true;
    }
  REQUIRE(cut_one);
  CHECK_THROWS_AS(Network::from_json(j.dump()), Error);
}

TEST_CASE("forward rejects shape mismatches and backward requires a forward") {
  const auto spec = parse_arch("flatten,dense:1");
  Network net(spec, {1, 2, 2}, 0);
  Tensor bad({1, 1, 3, 3});
  CHECK_THROWS_AS(net.forward(bad), Error);
  Network fresh(spec, {1, 2, 2}, 0);
  Tensor dl({1, 1}, {1.0});
  CHECK_THROWS_AS(fresh.backward(dl), Error);
}
