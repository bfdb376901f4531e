#include "network.hpp"

#include <cmath>
#include <nlohmann/json.hpp>

namespace hds::nn {

using nlohmann::json;

Network::Network(std::vector<LayerSpec> spec, std::vector<int> input_shape,
                 std::uint64_t init_seed)
    : spec_(std::move(spec)), input_shape_(std::move(input_shape)) {
  shapes_ = infer_shapes(spec_, input_shape_);
  setup_buffers();
  init_params(init_seed);
}

void Network::setup_buffers() {
  const size_t L = spec_.size();
  w_.assign(L, Tensor());
  b_.assign(L, Tensor());
  for (size_t i = 0; i < L; ++i) {
    const LayerSpec& l = spec_[i];
    if (l.kind == LayerKind::conv2d) {
      w_[i] = Tensor({l.filters, shapes_[i][0], l.kh, l.kw});
      b_[i] = Tensor({l.filters});
    } else if (l.kind == LayerKind::dense) {
      w_[i] = Tensor({l.width, shapes_[i][0]});
      b_[i] = Tensor({l.width});
    }
  }
  dw_ = w_;
  db_ = b_;
  acts_.assign(L + 1, Tensor());
  pool_args_.assign(L, {});
}

void Network::init_params(std::uint64_t seed) {
  std::mt19937_64 g = rng::make_stream(seed, rng::Stream::weight_init);
  for (size_t i = 0; i < spec_.size(); ++i) {
    if (w_[i].size() == 0) continue;
    const LayerSpec& l = spec_[i];
    std::int64_t fan_in, fan_out;
    if (l.kind == LayerKind::conv2d) {
      fan_in = static_cast<std::int64_t>(shapes_[i][0]) * l.kh * l.kw;
      fan_out = static_cast<std::int64_t>(l.filters) * l.kh * l.kw;
    } else {
      fan_in = shapes_[i][0];
      fan_out = l.width;
    }
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (double& v : w_[i].data) v = rng::uniform(g, -limit, limit);
    // biases stay zero
  }
}

std::int64_t Network::parameter_count() const {
  std::int64_t n = 0;
  for (const Tensor& t : w_) n += t.size();
  for (const Tensor& t : b_) n += t.size();
  return n;
}

void Network::zero_grads() {
  for (Tensor& t : dw_) t.zero();
  for (Tensor& t : db_) t.zero();
}

namespace {

std::vector<int> batched(int n, const std::vector<int>& s) {
  std::vector<int> out{n};
  out.insert(out.end(), s.begin(), s.end());
  return out;
}

}  // namespace

const Tensor& Network::forward(const Tensor& x) {
  require(!x.shape.empty(), Errc::shape_mismatch, "forward: empty input");
  const int N = x.shape[0];
  require(x.shape == batched(N, input_shape_), Errc::shape_mismatch,
          "forward: input shape does not match the network input");
  acts_[0] = x;
  for (size_t i = 0; i < spec_.size(); ++i) {
    const LayerSpec& l = spec_[i];
    const Tensor& in = acts_[i];
    Tensor& out = acts_[i + 1];
    switch (l.kind) {
      case LayerKind::conv2d:
        conv2d_forward_batch(in, w_[i], b_[i], l.stride, l.padding, out);
        break;
      case LayerKind::max_pool:
        pool_forward_batch(in, l.ph, l.pw, PoolMode::max, out, pool_args_[i]);
        break;
      case LayerKind::avg_pool: {
        std::vector<int32_t> unused;
        pool_forward_batch(in, l.ph, l.pw, PoolMode::avg, out, unused);
        break;
      }
      case LayerKind::dense:
        dense_forward_batch(in, w_[i], b_[i], out);
        break;
      case LayerKind::activation:
        activation_forward_batch(in, l.act, out);
        break;
      case LayerKind::flatten:
        out = in;
        out.shape = batched(N, shapes_[i + 1]);
        break;
    }
  }
  have_forward_ = true;
  return acts_.back();
}

void Network::backward(const Tensor& dloss) {
  require(have_forward_, Errc::state_error, "backward: no forward pass cached");
  const int N = acts_[0].shape[0];
  require(dloss.shape == std::vector<int>({N, 1}), Errc::shape_mismatch,
          "backward: loss gradient must be N x 1");
  Tensor grad = dloss;
  Tensor next;
  for (size_t ii = spec_.size(); ii-- > 0;) {
    const LayerSpec& l = spec_[ii];
    const Tensor& in = acts_[ii];
    switch (l.kind) {
      case LayerKind::conv2d:
        conv2d_backward_batch(in, w_[ii], l.stride, l.padding, grad, next, dw_[ii], db_[ii]);
        break;
      case LayerKind::max_pool:
        pool_backward_batch(in, l.ph, l.pw, PoolMode::max, grad, pool_args_[ii], next);
        break;
      case LayerKind::avg_pool:
        pool_backward_batch(in, l.ph, l.pw, PoolMode::avg, grad, {}, next);
        break;
      case LayerKind::dense:
        dense_backward_batch(in, w_[ii], grad, next, dw_[ii], db_[ii]);
        break;
      case LayerKind::activation:
        activation_backward_batch(in, l.act, grad, next);
        break;
      case LayerKind::flatten:
        next = grad;
        next.shape = in.shape;
        break;
    }
    grad = std::move(next);
  }
  have_forward_ = false;
}

std::vector<double> Network::predict(const Tensor& x) const {
  const int N = x.shape.empty() ? 0 : x.shape[0];
  require(x.shape == batched(N, input_shape_), Errc::shape_mismatch,
          "predict: input shape does not match the network input");
  Tensor cur = x, out;
  std::vector<int32_t> scratch;
  for (size_t i = 0; i < spec_.size(); ++i) {
    const LayerSpec& l = spec_[i];
    switch (l.kind) {
      case LayerKind::conv2d:
        conv2d_forward_batch(cur, w_[i], b_[i], l.stride, l.padding, out);
        break;
      case LayerKind::max_pool:
        pool_forward_batch(cur, l.ph, l.pw, PoolMode::max, out, scratch);
        break;
      case LayerKind::avg_pool:
        pool_forward_batch(cur, l.ph, l.pw, PoolMode::avg, out, scratch);
        break;
      case LayerKind::dense:
        dense_forward_batch(cur, w_[i], b_[i], out);
        break;
      case LayerKind::activation:
        activation_forward_batch(cur, l.act, out);
        break;
      case LayerKind::flatten:
        out = cur;
        out.shape = batched(N, shapes_[i + 1]);
        break;
    }
    cur = std::move(out);
  }
  return cur.data;
}

// ---- serialization ----

namespace {

json layer_to_json(const LayerSpec& l) {
  json j;
  j["kind"] = to_string(l.kind);
  switch (l.kind) {
    case LayerKind::conv2d:
      j["filters"] = l.filters;
      j["kernel"] = {l.kh, l.kw};
      j["stride"] = l.stride;
      j["padding"] = to_string(l.padding);
      break;
    case LayerKind::max_pool:
    case LayerKind::avg_pool:
      j["window"] = {l.ph, l.pw};
      break;
    case LayerKind::dense:
      j["width"] = l.width;
      break;
    case LayerKind::activation:
      j["fn"] = to_string(l.act);
      break;
    case LayerKind::flatten:
      break;
  }
  return j;
}

LayerSpec layer_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "conv2d") {
    const auto k = j.at("kernel").get<std::vector<int>>();
    require(k.size() == 2, Errc::io_error, "model: kernel must have two dims");
    const std::string pad = j.at("padding").get<std::string>();
    require(pad == "same" || pad == "valid", Errc::io_error, "model: bad padding");
    return LayerSpec::conv2d(j.at("filters").get<int>(), k[0], k[1], j.at("stride").get<int>(),
                             pad == "same" ? Padding::same : Padding::valid);
  }
  if (kind == "max_pool" || kind == "avg_pool") {
    const auto wdims = j.at("window").get<std::vector<int>>();
    require(wdims.size() == 2, Errc::io_error, "model: window must have two dims");
    return kind == "max_pool" ? LayerSpec::max_pool(wdims[0], wdims[1])
                              : LayerSpec::avg_pool(wdims[0], wdims[1]);
  }
  if (kind == "dense") return LayerSpec::dense(j.at("width").get<int>());
  if (kind == "activation") {
    const std::string fn = j.at("fn").get<std::string>();
    require(fn == "relu" || fn == "identity", Errc::io_error, "model: bad activation");
    return LayerSpec::activation(fn == "relu" ? Activation::relu : Activation::identity);
  }
  if (kind == "flatten") return LayerSpec::flatten();
  fail(Errc::io_error, "model: unknown layer kind '" + kind + "'");
}

}  // namespace

std::string Network::to_json() const {
  json j;
  j["format"] = "hdsurr-network-v1";
  j["input_shape"] = input_shape_;
  json layers = json::array();
  for (size_t i = 0; i < spec_.size(); ++i) {
    json l = layer_to_json(spec_[i]);
    if (w_[i].size() > 0) {
      l["w"] = w_[i].data;
      l["b"] = b_[i].data;
    }
    layers.push_back(std::move(l));
  }
  j["layers"] = std::move(layers);
  return j.dump();
}

Network Network::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(Errc::io_error, std::string("model: bad JSON: ") + e.what());
  }
  try {
    require(j.at("format").get<std::string>() == "hdsurr-network-v1", Errc::io_error,
            "model: unknown format");
    Network net;
    net.input_shape_ = j.at("input_shape").get<std::vector<int>>();
    for (const json& l : j.at("layers")) net.spec_.push_back(layer_from_json(l));
    net.shapes_ = infer_shapes(net.spec_, net.input_shape_);
    net.setup_buffers();
    for (size_t i = 0; i < net.spec_.size(); ++i) {
      const json& l = j.at("layers").at(i);
      if (net.w_[i].size() > 0) {
        auto wdata = l.at("w").get<std::vector<double>>();
        auto bdata = l.at("b").get<std::vector<double>>();
        require(static_cast<std::int64_t>(wdata.size()) == net.w_[i].size() &&
                    static_cast<std::int64_t>(bdata.size()) == net.b_[i].size(),
                Errc::io_error, "model: parameter block size mismatch");
        net.w_[i].data = std::move(wdata);
        net.b_[i].data = std::move(bdata);
      }
    }
    return net;
  } catch (const json::exception& e) {
    fail(Errc::io_error, std::string("model: missing or malformed field: ") + e.what());
  }
}

}  // namespace hds::nn
