#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "layers.hpp"
#include "tensor.hpp"

namespace hds::nn {

// A sequential network: the layer list plus one (weights, bias) pair per
// parameterized layer. Forward keeps per-layer activations so backward can
// run right after; predict() is const and uses its own scratch.
class Network {
 public:
  Network() = default;
  Network(std::vector<LayerSpec> spec, std::vector<int> input_shape, std::uint64_t init_seed);

  const std::vector<LayerSpec>& spec() const { return spec_; }
  const std::vector<int>& input_shape() const { return input_shape_; }
  const std::vector<std::vector<int>>& shapes() const { return shapes_; }

  // Parameter blocks in layer order (empty tensors for layers without params).
  std::vector<Tensor>& weights() { return w_; }
  std::vector<Tensor>& biases() { return b_; }
  const std::vector<Tensor>& weights() const { return w_; }
  const std::vector<Tensor>& biases() const { return b_; }
  std::vector<Tensor>& weight_grads() { return dw_; }
  std::vector<Tensor>& bias_grads() { return db_; }

  std::int64_t parameter_count() const;
  void zero_grads();

  // x: N x (input_shape...). Returns N x 1 predictions and keeps caches.
  const Tensor& forward(const Tensor& x);
  // dloss: N x 1 gradient of the loss w.r.t. the output. Accumulates into
  // weight_grads/bias_grads. Requires a preceding forward on the same batch.
  void backward(const Tensor& dloss);

  // Stateless evaluation (no caches touched).
  std::vector<double> predict(const Tensor& x) const;

  std::string to_json() const;
  static Network from_json(const std::string& text);

  bool operator==(const Network& o) const {
    return spec_ == o.spec_ && input_shape_ == o.input_shape_ && w_ == o.w_ && b_ == o.b_;
  }

 private:
  void init_params(std::uint64_t seed);
  void setup_buffers();

  std::vector<LayerSpec> spec_;
  std::vector<int> input_shape_;
  std::vector<std::vector<int>> shapes_;  // shapes_[i] feeds layer i
  std::vector<Tensor> w_, b_, dw_, db_;

  // forward/backward caches
  std::vector<Tensor> acts_;                     // acts_[0]=input, acts_[i+1]=layer i output
  std::vector<std::vector<int32_t>> pool_args_;  // per layer, max-pool only
  bool have_forward_ = false;
};

}  // namespace hds::nn
