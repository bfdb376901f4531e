#include "optim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace hds::nn {

double mse(const std::vector<double>& pred, const std::vector<double>& target) {
  require(pred.size() == target.size(), Errc::shape_mismatch, "mse: length mismatch");
  require(!pred.empty(), Errc::invalid_argument, "mse: empty inputs");
  double acc = 0.0;
  for (size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - target[i];
    acc += d * d;
  }
  return acc / static_cast<double>(pred.size());
}

AdamState::AdamState(const Network& net) {
  s_w = net.weights();
  for (Tensor& t_ : s_w) t_.zero();
  r_w = s_w;
  s_b = net.biases();
  for (Tensor& t_ : s_b) t_.zero();
  r_b = s_b;
}

namespace {

void adam_block(double* theta, double* g, double* s, double* r, std::int64_t n,
                const AdamConfig& c, double c1, double c2) {
  for (std::int64_t k = 0; k < n; ++k) {
    s[k] = c.rho1 * s[k] + (1.0 - c.rho1) * g[k];
    r[k] = c.rho2 * r[k] + (1.0 - c.rho2) * g[k] * g[k];
    const double sh = s[k] / c1;
    const double rh = r[k] / c2;
    theta[k] -= c.lr * sh / (std::sqrt(rh) + c.eps);
  }
}

}  // namespace

void AdamState::step(Network& net, const AdamConfig& cfg) {
  ++t;
  const double c1 = 1.0 - std::pow(cfg.rho1, static_cast<double>(t));
  const double c2 = 1.0 - std::pow(cfg.rho2, static_cast<double>(t));
  for (size_t i = 0; i < net.weights().size(); ++i) {
    if (net.weights()[i].size() == 0) continue;
    adam_block(net.weights()[i].ptr(), net.weight_grads()[i].ptr(), s_w[i].ptr(), r_w[i].ptr(),
               net.weights()[i].size(), cfg, c1, c2);
    adam_block(net.biases()[i].ptr(), net.bias_grads()[i].ptr(), s_b[i].ptr(), r_b[i].ptr(),
               net.biases()[i].size(), cfg, c1, c2);
  }
}

namespace {

Tensor gather_rows(const Tensor& x, const std::vector<int>& idx, size_t lo, size_t hi) {
  std::int64_t row = 1;
  for (size_t k = 1; k < x.shape.size(); ++k) row *= x.shape[k];
  std::vector<int> shape = x.shape;
  shape[0] = static_cast<int>(hi - lo);
  Tensor out(std::move(shape));
  for (size_t k = lo; k < hi; ++k)
    std::copy_n(x.ptr() + static_cast<std::int64_t>(idx[k]) * row, row,
                out.ptr() + static_cast<std::int64_t>(k - lo) * row);
  return out;
}

}  // namespace

TrainResult train(Network& net, const Tensor& x, const std::vector<double>& y,
                  const TrainConfig& cfg) {
  require(!x.shape.empty() && x.shape[0] == static_cast<int>(y.size()), Errc::shape_mismatch,
          "train: sample count mismatch between inputs and labels");
  require(cfg.epochs >= 1 && cfg.batch_size >= 1, Errc::invalid_argument,
          "train: epochs and batch size must be >= 1");
  require(cfg.val_fraction >= 0.0 && cfg.val_fraction < 1.0, Errc::invalid_argument,
          "train: val_fraction must be in [0, 1)");
  const int n = x.shape[0];

  // one fixed split, then an independent shuffle per epoch
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  {
    std::mt19937_64 g = rng::make_stream(cfg.seed, rng::Stream::split);
    for (int i = n - 1; i > 0; --i) std::swap(order[i], order[rng::below(g, i + 1)]);
  }
  const int n_val = static_cast<int>(cfg.val_fraction * n);
  std::vector<int> val_idx(order.begin(), order.begin() + n_val);
  std::vector<int> train_idx(order.begin() + n_val, order.end());
  require(!train_idx.empty(), Errc::invalid_argument, "train: no training samples left");

  Tensor x_val;
  std::vector<double> y_val;
  if (n_val > 0) {
    x_val = gather_rows(x, val_idx, 0, val_idx.size());
    y_val.reserve(n_val);
    for (int i : val_idx) y_val.push_back(y[i]);
  }

  TrainResult res;
  AdamState adam(net);
  std::vector<Tensor> best_w = net.weights(), best_b = net.biases();
  res.best_val = std::numeric_limits<double>::infinity();
  int stale = 0;

  std::vector<double> y_batch;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    {
      std::mt19937_64 g = rng::make_stream(cfg.seed, rng::Stream::shuffle,
                                           static_cast<std::uint64_t>(epoch));
      for (int i = static_cast<int>(train_idx.size()) - 1; i > 0; --i)
        std::swap(train_idx[i], train_idx[rng::below(g, i + 1)]);
    }
    double sse = 0.0;
    for (size_t lo = 0; lo < train_idx.size(); lo += cfg.batch_size) {
      const size_t hi = std::min(lo + cfg.batch_size, train_idx.size());
      const int m = static_cast<int>(hi - lo);
      Tensor xb = gather_rows(x, train_idx, lo, hi);
      y_batch.clear();
      for (size_t k = lo; k < hi; ++k) y_batch.push_back(y[train_idx[k]]);

      const Tensor& pred = net.forward(xb);
      Tensor dloss({m, 1});
      double batch_sse = 0.0;
      for (int k = 0; k < m; ++k) {
        const double d = pred.data[k] - y_batch[k];
        batch_sse += d * d;
        dloss.data[k] = 2.0 * d / static_cast<double>(m);
      }
      require(std::isfinite(batch_sse), Errc::numeric_error,
              "training diverged at epoch " + std::to_string(epoch + 1));
      sse += batch_sse;
      net.zero_grads();
      net.backward(dloss);
      adam.step(net, cfg.adam);
    }
    const double tl = sse / static_cast<double>(train_idx.size());
    res.train_loss.push_back(tl);
    const double vl = n_val > 0 ? mse(net.predict(x_val), y_val) : tl;
    res.val_loss.push_back(vl);
    require(std::isfinite(vl), Errc::numeric_error,
            "training diverged at epoch " + std::to_string(epoch + 1));
    res.epochs_run = epoch + 1;

    if (vl < res.best_val - cfg.min_delta) {
      res.best_val = vl;
      res.best_epoch = epoch;
      best_w = net.weights();
      best_b = net.biases();
      stale = 0;
    } else {
      ++stale;
      if (cfg.patience > 0 && stale >= cfg.patience) break;
    }
  }

  net.weights() = std::move(best_w);
  net.biases() = std::move(best_b);
  return res;
}

}  // namespace hds::nn
