#include "surrogate.hpp"

#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

namespace hds::surrogate {

using nn::Tensor;
using nlohmann::json;

std::vector<nn::LayerSpec> default_arch(int grid_h, int grid_w) {
  std::string s = "conv:16:3x3:same,relu,conv:32:3x3:same,relu,";
  if (grid_h % 2 == 0 && grid_w % 2 == 0) s += "avgpool:2x2,";
  s += "flatten,dense:64,relu,dense:1";
  return nn::parse_arch(s);
}

Tensor CnnSurrogate::to_grid(std::span<const double> X, int n) const {
  require(static_cast<int>(X.size()) == n * d_, Errc::shape_mismatch,
          "surrogate: design matrix size mismatch");
  Tensor t({n, 1, grid_h_, grid_w_});
  const int cells = grid_h_ * grid_w_;
  for (int i = 0; i < n; ++i) {
    const double* row = X.data() + static_cast<std::size_t>(i) * d_;
    double* cell = t.ptr() + static_cast<std::int64_t>(i) * cells;
    for (int j = 0; j < d_; ++j) {
      const double w = hi_[j] - lo_[j];
      cell[j] = w > 0.0 ? 2.0 * (row[j] - lo_[j]) / w - 1.0 : 0.0;
    }
  }
  return t;
}

CnnSurrogate CnnSurrogate::fit(const CnnSurrogateConfig& cfg, const doe::Dataset& data,
                               nn::TrainResult* history) {
  require(data.n >= 1 && data.d >= 1, Errc::invalid_argument, "fit: empty dataset");
  require(static_cast<int>(data.bounds.size()) == data.d, Errc::invalid_argument,
          "fit: dataset bounds missing");
  for (double v : data.y)
    require(std::isfinite(v), Errc::invalid_argument, "fit: non-finite label");

  CnnSurrogate m;
  m.d_ = data.d;
  std::tie(m.grid_h_, m.grid_w_) = cfg.grid ? *cfg.grid : doe::grid_shape(data.d);
  require(m.grid_h_ * m.grid_w_ >= data.d, Errc::invalid_argument,
          "fit: grid smaller than the input dimension");
  m.lo_.resize(data.d);
  m.hi_.resize(data.d);
  for (int j = 0; j < data.d; ++j) {
    m.lo_[j] = data.bounds[j].first;
    m.hi_[j] = data.bounds[j].second;
    require(m.lo_[j] <= m.hi_[j], Errc::invalid_argument, "fit: inverted bounds");
  }

  double mu = 0.0;
  for (double v : data.y) mu += v;
  mu /= data.n;
  double var = 0.0;
  for (double v : data.y) var += (v - mu) * (v - mu);
  var /= data.n;
  m.mu_y_ = mu;
  m.sigma_y_ = std::sqrt(var);

  if (m.sigma_y_ == 0.0) {
    m.constant_ = true;
    m.constant_value_ = mu;
    m.sigma_y_ = 1.0;
    return m;
  }

  std::vector<double> yz(data.n);
  for (int i = 0; i < data.n; ++i) yz[i] = (data.y[i] - mu) / m.sigma_y_;

  const std::vector<nn::LayerSpec> arch =
      cfg.arch.empty() ? default_arch(m.grid_h_, m.grid_w_) : cfg.arch;
  m.net_ = nn::Network(arch, {1, m.grid_h_, m.grid_w_}, cfg.init_seed);
  const Tensor xt = m.to_grid(data.X, data.n);
  nn::TrainResult res = nn::train(m.net_, xt, yz, cfg.train);
  if (history) *history = std::move(res);
  return m;
}

double CnnSurrogate::predict(std::span<const double> x) const {
  require(static_cast<int>(x.size()) == d_, Errc::shape_mismatch,
          "predict: wrong input dimension");
  return predict_batch(x, 1)[0];
}

std::vector<double> CnnSurrogate::predict_batch(std::span<const double> X, int n) const {
  require(static_cast<int>(X.size()) == n * d_, Errc::shape_mismatch,
          "predict: design matrix size mismatch");
  std::vector<double> out;
  out.reserve(n);
  if (constant_) {
    out.assign(n, constant_value_);
    return out;
  }
  constexpr int kChunk = 256;
  for (int lo = 0; lo < n; lo += kChunk) {
    const int m = std::min(kChunk, n - lo);
    const Tensor xt = to_grid({X.data() + static_cast<std::size_t>(lo) * d_,
                               static_cast<std::size_t>(m) * d_},
                              m);
    for (double z : net_.predict(xt)) out.push_back(mu_y_ + sigma_y_ * z);
  }
  return out;
}

std::string CnnSurrogate::to_json() const {
  json j;
  j["format"] = "hdsurr-surrogate-v1";
  j["d"] = d_;
  j["grid"] = {grid_h_, grid_w_};
  j["lo"] = lo_;
  j["hi"] = hi_;
  j["mu_y"] = mu_y_;
  j["sigma_y"] = sigma_y_;
  j["constant"] = constant_;
  if (constant_)
    j["constant_value"] = constant_value_;
  else
    j["network"] = json::parse(net_.to_json());
  return j.dump();
}

CnnSurrogate CnnSurrogate::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(Errc::io_error, std::string("surrogate: bad JSON: ") + e.what());
  }
  try {
    require(j.at("format").get<std::string>() == "hdsurr-surrogate-v1", Errc::io_error,
            "surrogate: unknown format");
    CnnSurrogate m;
    m.d_ = j.at("d").get<int>();
    const auto grid = j.at("grid").get<std::vector<int>>();
    require(grid.size() == 2, Errc::io_error, "surrogate: bad grid");
    m.grid_h_ = grid[0];
    m.grid_w_ = grid[1];
    m.lo_ = j.at("lo").get<std::vector<double>>();
    m.hi_ = j.at("hi").get<std::vector<double>>();
    require(static_cast<int>(m.lo_.size()) == m.d_ && static_cast<int>(m.hi_.size()) == m.d_,
            Errc::io_error, "surrogate: bounds size mismatch");
    m.mu_y_ = j.at("mu_y").get<double>();
    m.sigma_y_ = j.at("sigma_y").get<double>();
    m.constant_ = j.at("constant").get<bool>();
    if (m.constant_)
      m.constant_value_ = j.at("constant_value").get<double>();
    else
      m.net_ = nn::Network::from_json(j.at("network").dump());
    return m;
  } catch (const json::exception& e) {
    fail(Errc::io_error, std::string("surrogate: missing field: ") + e.what());
  }
}

void CnnSurrogate::save(const std::string& path) const {
  std::ofstream f(path);
  require(f.good(), Errc::io_error, "cannot open for writing: " + path);
  f << to_json() << '\n';
  require(f.good(), Errc::io_error, "short write: " + path);
}

CnnSurrogate CnnSurrogate::load(const std::string& path) {
  std::ifstream f(path);
  require(f.good(), Errc::io_error, "cannot open: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return from_json(ss.str());
}

}  // namespace hds::surrogate
