#pragma once

#include <array>
#include <string>
#include <vector>

#include "tensor.hpp"

namespace hds::nn {

enum class LayerKind { conv2d, max_pool, avg_pool, dense, activation, flatten };
enum class Padding { valid, same };
enum class Activation { relu, identity };
enum class PoolMode { max, avg };

struct LayerSpec {
  LayerKind kind = LayerKind::flatten;
  // conv2d
  int filters = 0;
  int kh = 0, kw = 0;
  int stride = 1;
  Padding padding = Padding::valid;
  // pooling
  int ph = 0, pw = 0;
  // dense
  int width = 0;
  // activation
  Activation act = Activation::relu;

  static LayerSpec conv2d(int filters, int kh, int kw, int stride = 1, Padding pad = Padding::valid);
  static LayerSpec max_pool(int ph, int pw);
  static LayerSpec avg_pool(int ph, int pw);
  static LayerSpec dense(int width);
  static LayerSpec activation(Activation a);
  static LayerSpec flatten();

  bool operator==(const LayerSpec&) const = default;
};

// Compact layer-string form, e.g.
//   "conv:16:3x3:same,relu,conv:32:3x3:same,relu,avgpool:2x2,flatten,dense:64,relu,dense:1"
std::vector<LayerSpec> parse_arch(const std::string& s);
std::string format_arch(const std::vector<LayerSpec>& spec);

// Output shape of one layer given its input shape. Throws on any mismatch
// (bad channel count, non-positive output dims, non-divisible pool windows,
// dense on unflattened input).
std::vector<int> layer_output_shape(const LayerSpec& l, const std::vector<int>& in);

// Shapes threaded through the whole stack: result[0] is the input shape,
// result[i + 1] the output of layer i. Validates the scalar-regression tail
// (last layer dense of width 1).
std::vector<std::vector<int>> infer_shapes(const std::vector<LayerSpec>& spec,
                                           const std::vector<int>& input_shape);

// ---- padding / output-size rules ----

struct Conv2dGeom {
  int oh = 0, ow = 0;
  int pad_top = 0, pad_left = 0;
};

// "same": out = ceil(in / stride), zeros outside, extra pad on bottom/right
// when the total is odd. "valid": no padding.
Conv2dGeom conv2d_geometry(int h, int w, int kh, int kw, int stride, Padding pad);

// ---- single-sample ops ----

// input C x H x W, weights F x C x kh x kw, bias length F.
Tensor conv2d_forward(const Tensor& input, const Tensor& weights, const Tensor& bias, int stride,
                      Padding pad);

Tensor pool_forward(const Tensor& input, int ph, int pw, PoolMode mode);

// weights n_out x n_in.
std::vector<double> dense_forward(const std::vector<double>& input, const Tensor& weights,
                                  const Tensor& bias);

// ---- batched kernels (leading N dimension) used by Network ----

void conv2d_forward_batch(const Tensor& in, const Tensor& w, const Tensor& b, int stride,
                          Padding pad, Tensor& out);
// Accumulates into dw/db; overwrites din.
void conv2d_backward_batch(const Tensor& in, const Tensor& w, int stride, Padding pad,
                           const Tensor& dout, Tensor& din, Tensor& dw, Tensor& db);

void pool_forward_batch(const Tensor& in, int ph, int pw, PoolMode mode, Tensor& out,
                        std::vector<int32_t>& argmax);
void pool_backward_batch(const Tensor& in, int ph, int pw, PoolMode mode, const Tensor& dout,
                         const std::vector<int32_t>& argmax, Tensor& din);

void dense_forward_batch(const Tensor& in, const Tensor& w, const Tensor& b, Tensor& out);
void dense_backward_batch(const Tensor& in, const Tensor& w, const Tensor& dout, Tensor& din,
                          Tensor& dw, Tensor& db);

void activation_forward_batch(const Tensor& in, Activation act, Tensor& out);
void activation_backward_batch(const Tensor& in, Activation act, const Tensor& dout, Tensor& din);

const char* to_string(LayerKind k);
const char* to_string(Padding p);
const char* to_string(Activation a);

}  // namespace hds::nn
