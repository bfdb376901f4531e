#include "layers.hpp"

#include <Eigen/Core>

#include <cctype>
#include <charconv>
#include <cstring>
#include <sstream>

namespace hds::nn {

LayerSpec LayerSpec::conv2d(int filters, int kh, int kw, int stride, Padding pad) {
  require(filters >= 1 && kh >= 1 && kw >= 1 && stride >= 1, Errc::invalid_argument,
          "conv2d: filters, kernel dims and stride must be >= 1");
  LayerSpec l;
  l.kind = LayerKind::conv2d;
  l.filters = filters;
  l.kh = kh;
  l.kw = kw;
  l.stride = stride;
  l.padding = pad;
  return l;
}

LayerSpec LayerSpec::max_pool(int ph, int pw) {
  require(ph >= 1 && pw >= 1, Errc::invalid_argument, "pool: window dims must be >= 1");
  LayerSpec l;
  l.kind = LayerKind::max_pool;
  l.ph = ph;
  l.pw = pw;
  return l;
}

LayerSpec LayerSpec::avg_pool(int ph, int pw) {
  LayerSpec l = max_pool(ph, pw);
  l.kind = LayerKind::avg_pool;
  return l;
}

LayerSpec LayerSpec::dense(int width) {
  require(width >= 1, Errc::invalid_argument, "dense: width must be >= 1");
  LayerSpec l;
  l.kind = LayerKind::dense;
  l.width = width;
  return l;
}

LayerSpec LayerSpec::activation(Activation a) {
  LayerSpec l;
  l.kind = LayerKind::activation;
  l.act = a;
  return l;
}

LayerSpec LayerSpec::flatten() {
  LayerSpec l;
  l.kind = LayerKind::flatten;
  return l;
}

const char* to_string(LayerKind k) {
  switch (k) {
    case LayerKind::conv2d: return "conv2d";
    case LayerKind::max_pool: return "max_pool";
    case LayerKind::avg_pool: return "avg_pool";
    case LayerKind::dense: return "dense";
    case LayerKind::activation: return "activation";
    case LayerKind::flatten: return "flatten";
  }
  return "?";
}

const char* to_string(Padding p) { return p == Padding::same ? "same" : "valid"; }
const char* to_string(Activation a) { return a == Activation::relu ? "relu" : "identity"; }

Conv2dGeom conv2d_geometry(int h, int w, int kh, int kw, int stride, Padding pad) {
  Conv2dGeom g;
  if (pad == Padding::same) {
    g.oh = (h + stride - 1) / stride;
    g.ow = (w + stride - 1) / stride;
    const int total_h = std::max(0, (g.oh - 1) * stride + kh - h);
    const int total_w = std::max(0, (g.ow - 1) * stride + kw - w);
    g.pad_top = total_h / 2;  // odd remainder goes to bottom/right
    g.pad_left = total_w / 2;
  } else {
    g.oh = (h - kh) / stride + 1;
    g.ow = (w - kw) / stride + 1;
  }
  require(g.oh >= 1 && g.ow >= 1, Errc::shape_mismatch, "conv2d: non-positive output dims");
  return g;
}

namespace {

// Output index range such that i*stride + offset - pad lands inside [0, extent).
inline std::pair<int, int> valid_range(int out_extent, int in_extent, int stride, int offset,
                                       int pad) {
  const int shift = pad - offset;  // need i*stride >= shift
  int lo = shift > 0 ? (shift + stride - 1) / stride : 0;
  int hi = (in_extent - 1 + shift) / stride + 1;
  if (hi > out_extent) hi = out_extent;
  if (lo > hi) lo = hi;
  return {lo, hi};
}

void check_conv_shapes(const Tensor& in, const Tensor& w, const Tensor& b) {
  require(in.shape.size() == 4, Errc::shape_mismatch, "conv2d: input must be N x C x H x W");
  require(w.shape.size() == 4, Errc::shape_mismatch, "conv2d: weights must be F x C x kh x kw");
  require(b.shape.size() == 1 && b.shape[0] == w.shape[0], Errc::shape_mismatch,
          "conv2d: bias length must equal filter count");
  require(w.shape[1] == in.shape[1], Errc::shape_mismatch,
          "conv2d: input channels do not match weight channels");
}

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapRow = Eigen::Map<RowMat>;
using CMapRow = Eigen::Map<const RowMat>;

// Lay one sample out as a (C*kh*kw) x (oh*ow) patch matrix so the convolution
// becomes a single GEMM against the F x (C*kh*kw) weight matrix.  Row
// (c*kh + a)*kw + bb holds that tap's input value for every output pixel,
// zero where the tap falls in the padding.  Every element is written exactly
// once, so the buffer needs no prior clearing.
void im2col(const double* inb, int C, int H, int W, int kh, int kw, int stride,
            const Conv2dGeom& g, double* buf) {
  const std::int64_t P = static_cast<std::int64_t>(g.oh) * g.ow;
  for (int c = 0; c < C; ++c) {
    const double* iplane = inb + static_cast<std::int64_t>(c) * H * W;
    for (int a = 0; a < kh; ++a) {
      const auto [ilo, ihi] = valid_range(g.oh, H, stride, a, g.pad_top);
      for (int bb = 0; bb < kw; ++bb) {
        const auto [jlo, jhi] = valid_range(g.ow, W, stride, bb, g.pad_left);
        double* row = buf + (static_cast<std::int64_t>(c * kh + a) * kw + bb) * P;
        for (int i = 0; i < g.oh; ++i) {
          double* dst = row + static_cast<std::int64_t>(i) * g.ow;
          if (i < ilo || i >= ihi) {
            std::fill(dst, dst + g.ow, 0.0);
            continue;
          }
          const int y = i * stride + a - g.pad_top;
          const double* src = iplane + static_cast<std::int64_t>(y) * W +
                              (static_cast<std::int64_t>(jlo) * stride + bb - g.pad_left);
          std::fill(dst, dst + jlo, 0.0);
          if (stride == 1) {
            std::copy(src, src + (jhi - jlo), dst + jlo);
          } else {
            for (int j = 0; j < jhi - jlo; ++j)
              dst[jlo + j] = src[static_cast<std::int64_t>(j) * stride];
          }
          std::fill(dst + jhi, dst + g.ow, 0.0);
        }
      }
    }
  }
}

// Scatter-add the patch-matrix gradient back onto the input plane; the
// padding rows of buf have no destination and are skipped.
void col2im_add(const double* buf, int C, int H, int W, int kh, int kw, int stride,
                const Conv2dGeom& g, double* dinb) {
  const std::int64_t P = static_cast<std::int64_t>(g.oh) * g.ow;
  for (int c = 0; c < C; ++c) {
    double* dplane = dinb + static_cast<std::int64_t>(c) * H * W;
    for (int a = 0; a < kh; ++a) {
      const auto [ilo, ihi] = valid_range(g.oh, H, stride, a, g.pad_top);
      for (int bb = 0; bb < kw; ++bb) {
        const auto [jlo, jhi] = valid_range(g.ow, W, stride, bb, g.pad_left);
        const double* row = buf + (static_cast<std::int64_t>(c * kh + a) * kw + bb) * P;
        const int len = jhi - jlo;
        for (int i = ilo; i < ihi; ++i) {
          const int y = i * stride + a - g.pad_top;
          double* dst = dplane + static_cast<std::int64_t>(y) * W +
                        (static_cast<std::int64_t>(jlo) * stride + bb - g.pad_left);
          const double* src = row + static_cast<std::int64_t>(i) * g.ow + jlo;
          if (stride == 1) {
            for (int j = 0; j < len; ++j) dst[j] += src[j];
          } else {
            for (int j = 0; j < len; ++j) dst[static_cast<std::int64_t>(j) * stride] += src[j];
          }
        }
      }
    }
  }
}

}  // namespace

void conv2d_forward_batch(const Tensor& in, const Tensor& w, const Tensor& b, int stride,
                          Padding pad, Tensor& out) {
  check_conv_shapes(in, w, b);
  const int N = in.shape[0], C = in.shape[1], H = in.shape[2], W = in.shape[3];
  const int F = w.shape[0], kh = w.shape[2], kw = w.shape[3];
  const Conv2dGeom g = conv2d_geometry(H, W, kh, kw, stride, pad);
  out = Tensor({N, F, g.oh, g.ow});

  const std::int64_t K = static_cast<std::int64_t>(C) * kh * kw;
  const std::int64_t P = static_cast<std::int64_t>(g.oh) * g.ow;
  std::vector<double> buf(K * P);
  CMapRow Wm(w.ptr(), F, K);
  const Eigen::Map<const Eigen::VectorXd> bv(b.ptr(), F);
  for (int n = 0; n < N; ++n) {
    const double* inb = in.ptr() + static_cast<std::int64_t>(n) * C * H * W;
    im2col(inb, C, H, W, kh, kw, stride, g, buf.data());
    MapRow Om(out.ptr() + static_cast<std::int64_t>(n) * F * P, F, P);
    Om.noalias() = Wm * CMapRow(buf.data(), K, P);
    Om.colwise() += bv;
  }
}

void conv2d_backward_batch(const Tensor& in, const Tensor& w, int stride, Padding pad,
                           const Tensor& dout, Tensor& din, Tensor& dw, Tensor& db) {
  const int N = in.shape[0], C = in.shape[1], H = in.shape[2], W = in.shape[3];
  const int F = w.shape[0], kh = w.shape[2], kw = w.shape[3];
  const Conv2dGeom g = conv2d_geometry(H, W, kh, kw, stride, pad);
  require(dout.shape == std::vector<int>({N, F, g.oh, g.ow}), Errc::shape_mismatch,
          "conv2d backward: upstream gradient shape mismatch");
  din = Tensor({N, C, H, W});
  require(dw.same_shape(w) && db.shape == std::vector<int>({F}), Errc::shape_mismatch,
          "conv2d backward: gradient buffer shape mismatch");

  const std::int64_t K = static_cast<std::int64_t>(C) * kh * kw;
  const std::int64_t P = static_cast<std::int64_t>(g.oh) * g.ow;
  std::vector<double> buf(K * P), dcol(K * P);
  CMapRow Wm(w.ptr(), F, K);
  MapRow dWm(dw.ptr(), F, K);
  Eigen::Map<Eigen::VectorXd> dbv(db.ptr(), F);
  for (int n = 0; n < N; ++n) {
    const double* inb = in.ptr() + static_cast<std::int64_t>(n) * C * H * W;
    CMapRow Gm(dout.ptr() + static_cast<std::int64_t>(n) * F * P, F, P);
    // plain loop: Eigen's redux reorders terms based on buffer alignment, which
    // makes repeated runs differ in the last ulp
    for (int f = 0; f < F; ++f) {
      const double* gr = Gm.data() + static_cast<std::int64_t>(f) * P;
      double acc = 0.0;
      for (std::int64_t p = 0; p < P; ++p) acc += gr[p];
      dbv[f] += acc;
    }
    im2col(inb, C, H, W, kh, kw, stride, g, buf.data());
    dWm.noalias() += Gm * CMapRow(buf.data(), K, P).transpose();
    MapRow Dm(dcol.data(), K, P);
    Dm.noalias() = Wm.transpose() * Gm;
    col2im_add(dcol.data(), C, H, W, kh, kw, stride, g,
               din.ptr() + static_cast<std::int64_t>(n) * C * H * W);
  }
}

void pool_forward_batch(const Tensor& in, int ph, int pw, PoolMode mode, Tensor& out,
                        std::vector<int32_t>& argmax) {
  require(in.shape.size() == 4, Errc::shape_mismatch, "pool: input must be N x C x H x W");
  const int N = in.shape[0], C = in.shape[1], H = in.shape[2], W = in.shape[3];
  require(ph <= H && pw <= W, Errc::shape_mismatch, "pool: window larger than input");
  require(H % ph == 0 && W % pw == 0, Errc::shape_mismatch,
          "pool: input dims must be divisible by the window");
  const int oh = H / ph, ow = W / pw;
  out = Tensor({N, C, oh, ow});
  if (mode == PoolMode::max) argmax.assign(static_cast<size_t>(out.size()), 0);

  const double inv = 1.0 / (static_cast<double>(ph) * pw);
  for (int n = 0; n < N; ++n) {
    for (int c = 0; c < C; ++c) {
      const double* iplane = in.ptr() + (static_cast<std::int64_t>(n) * C + c) * H * W;
      const std::int64_t obase = (static_cast<std::int64_t>(n) * C + c) * oh * ow;
      for (int i = 0; i < oh; ++i) {
        for (int j = 0; j < ow; ++j) {
          if (mode == PoolMode::max) {
            // first element in row-major scan wins ties
            double best = iplane[static_cast<std::int64_t>(i) * ph * W + static_cast<std::int64_t>(j) * pw];
            int32_t best_idx = static_cast<int32_t>(i * ph * W + j * pw);
            for (int a = 0; a < ph; ++a) {
              for (int bb = 0; bb < pw; ++bb) {
                const int32_t idx = static_cast<int32_t>((i * ph + a) * W + j * pw + bb);
                const double v = iplane[idx];
                if (v > best) {
                  best = v;
                  best_idx = idx;
                }
              }
            }
            out.data[obase + static_cast<std::int64_t>(i) * ow + j] = best;
            argmax[obase + static_cast<std::int64_t>(i) * ow + j] = best_idx;
          } else {
            double sum = 0.0;
            for (int a = 0; a < ph; ++a)
              for (int bb = 0; bb < pw; ++bb)
                sum += iplane[static_cast<std::int64_t>(i * ph + a) * W + j * pw + bb];
            out.data[obase + static_cast<std::int64_t>(i) * ow + j] = sum * inv;
          }
        }
      }
    }
  }
}

void pool_backward_batch(const Tensor& in, int ph, int pw, PoolMode mode, const Tensor& dout,
                         const std::vector<int32_t>& argmax, Tensor& din) {
  const int N = in.shape[0], C = in.shape[1], H = in.shape[2], W = in.shape[3];
  const int oh = H / ph, ow = W / pw;
  require(dout.shape == std::vector<int>({N, C, oh, ow}), Errc::shape_mismatch,
          "pool backward: upstream gradient shape mismatch");
  din = Tensor({N, C, H, W});
  const double inv = 1.0 / (static_cast<double>(ph) * pw);
  for (int n = 0; n < N; ++n) {
    for (int c = 0; c < C; ++c) {
      double* dplane = din.ptr() + (static_cast<std::int64_t>(n) * C + c) * H * W;
      const std::int64_t obase = (static_cast<std::int64_t>(n) * C + c) * oh * ow;
      for (int i = 0; i < oh; ++i) {
        for (int j = 0; j < ow; ++j) {
          const double gv = dout.data[obase + static_cast<std::int64_t>(i) * ow + j];
          if (mode == PoolMode::max) {
            dplane[argmax[obase + static_cast<std::int64_t>(i) * ow + j]] += gv;
          } else {
            const double share = gv * inv;
            for (int a = 0; a < ph; ++a)
              for (int bb = 0; bb < pw; ++bb)
                dplane[static_cast<std::int64_t>(i * ph + a) * W + j * pw + bb] += share;
          }
        }
      }
    }
  }
}

void dense_forward_batch(const Tensor& in, const Tensor& w, const Tensor& b, Tensor& out) {
  require(in.shape.size() == 2, Errc::shape_mismatch, "dense: input must be N x n_in");
  require(w.shape.size() == 2 && w.shape[1] == in.shape[1], Errc::shape_mismatch,
          "dense: input length does not match weight columns");
  require(b.shape.size() == 1 && b.shape[0] == w.shape[0], Errc::shape_mismatch,
          "dense: bias length must equal output width");
  const int N = in.shape[0], n_in = in.shape[1], n_out = w.shape[0];
  out = Tensor({N, n_out});
  MapRow Om(out.ptr(), N, n_out);
  Om.noalias() = CMapRow(in.ptr(), N, n_in) * CMapRow(w.ptr(), n_out, n_in).transpose();
  Om.rowwise() += Eigen::Map<const Eigen::RowVectorXd>(b.ptr(), n_out);
}

void dense_backward_batch(const Tensor& in, const Tensor& w, const Tensor& dout, Tensor& din,
                          Tensor& dw, Tensor& db) {
  const int N = in.shape[0], n_in = in.shape[1], n_out = w.shape[0];
  require(dout.shape == std::vector<int>({N, n_out}), Errc::shape_mismatch,
          "dense backward: upstream gradient shape mismatch");
  din = Tensor({N, n_in});
  CMapRow Gm(dout.ptr(), N, n_out);
  MapRow(din.ptr(), N, n_in).noalias() = Gm * CMapRow(w.ptr(), n_out, n_in);
  MapRow(dw.ptr(), n_out, n_in).noalias() += Gm.transpose() * CMapRow(in.ptr(), N, n_in);
  // plain loop instead of colwise().sum(): see conv2d_backward_batch
  const double* gp = dout.ptr();
  double* dbp = db.ptr();
  for (int r = 0; r < N; ++r)
    for (int j = 0; j < n_out; ++j) dbp[j] += gp[static_cast<std::int64_t>(r) * n_out + j];
}

void activation_forward_batch(const Tensor& in, Activation act, Tensor& out) {
  out = in;
  if (act == Activation::relu)
    for (double& v : out.data)
      if (v < 0.0) v = 0.0;
}

void activation_backward_batch(const Tensor& in, Activation act, const Tensor& dout, Tensor& din) {
  require(dout.same_shape(in), Errc::shape_mismatch, "activation backward: shape mismatch");
  din = dout;
  if (act == Activation::relu)
    for (std::int64_t k = 0; k < in.size(); ++k)
      if (in.data[k] <= 0.0) din.data[k] = 0.0;
}

std::vector<int> layer_output_shape(const LayerSpec& l, const std::vector<int>& in) {
  switch (l.kind) {
    case LayerKind::conv2d: {
      require(in.size() == 3, Errc::shape_mismatch, "conv2d: expects a C x H x W input");
      const Conv2dGeom g = conv2d_geometry(in[1], in[2], l.kh, l.kw, l.stride, l.padding);
      return {l.filters, g.oh, g.ow};
    }
    case LayerKind::max_pool:
    case LayerKind::avg_pool: {
      require(in.size() == 3, Errc::shape_mismatch, "pool: expects a C x H x W input");
      require(l.ph <= in[1] && l.pw <= in[2], Errc::shape_mismatch, "pool: window larger than input");
      require(in[1] % l.ph == 0 && in[2] % l.pw == 0, Errc::shape_mismatch,
              "pool: input dims must be divisible by the window");
      return {in[0], in[1] / l.ph, in[2] / l.pw};
    }
    case LayerKind::dense:
      require(in.size() == 1, Errc::shape_mismatch, "dense: expects a flattened input");
      return {l.width};
    case LayerKind::activation:
      return in;
    case LayerKind::flatten: {
      int n = 1;
      for (int v : in) n *= v;
      return {n};
    }
  }
  fail(Errc::invalid_argument, "unknown layer kind");
}

std::vector<std::vector<int>> infer_shapes(const std::vector<LayerSpec>& spec,
                                           const std::vector<int>& input_shape) {
  require(!spec.empty(), Errc::invalid_argument, "network spec must be non-empty");
  std::vector<std::vector<int>> shapes{input_shape};
  for (const LayerSpec& l : spec) shapes.push_back(layer_output_shape(l, shapes.back()));
  const LayerSpec& last = spec.back();
  require(last.kind == LayerKind::dense && last.width == 1, Errc::invalid_argument,
          "network spec must end in a dense layer of width 1");
  return shapes;
}

// ---- single-sample wrappers ----

namespace {

Tensor with_batch_dim(const Tensor& t) {
  std::vector<int> s{1};
  s.insert(s.end(), t.shape.begin(), t.shape.end());
  return Tensor(std::move(s), t.data);
}

Tensor drop_batch_dim(Tensor t) {
  t.shape.erase(t.shape.begin());
  return t;
}

}  // namespace

Tensor conv2d_forward(const Tensor& input, const Tensor& weights, const Tensor& bias, int stride,
                      Padding pad) {
  require(input.shape.size() == 3, Errc::shape_mismatch, "conv2d: input must be C x H x W");
  require(stride >= 1, Errc::invalid_argument, "conv2d: stride must be >= 1");
  Tensor out;
  conv2d_forward_batch(with_batch_dim(input), weights, bias, stride, pad, out);
  return drop_batch_dim(std::move(out));
}

Tensor pool_forward(const Tensor& input, int ph, int pw, PoolMode mode) {
  require(input.shape.size() == 3, Errc::shape_mismatch, "pool: input must be C x H x W");
  Tensor out;
  std::vector<int32_t> argmax;
  pool_forward_batch(with_batch_dim(input), ph, pw, mode, out, argmax);
  return drop_batch_dim(std::move(out));
}

std::vector<double> dense_forward(const std::vector<double>& input, const Tensor& weights,
                                  const Tensor& bias) {
  Tensor in({1, static_cast<int>(input.size())}, input);
  Tensor out;
  dense_forward_batch(in, weights, bias, out);
  return out.data;
}

// ---- arch strings ----

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      parts.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(ch))) {
      cur.push_back(ch);
    }
  }
  parts.push_back(cur);
  return parts;
}

int parse_int(const std::string& s, const char* what) {
  int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  require(ec == std::errc() && p == s.data() + s.size() && v >= 1, Errc::invalid_argument,
          std::string("arch: bad ") + what + " '" + s + "'");
  return v;
}

std::pair<int, int> parse_dims(const std::string& s, const char* what) {
  const auto x = s.find('x');
  require(x != std::string::npos, Errc::invalid_argument,
          std::string("arch: expected HxW for ") + what);
  return {parse_int(s.substr(0, x), what), parse_int(s.substr(x + 1), what)};
}

}  // namespace

std::vector<LayerSpec> parse_arch(const std::string& s) {
  std::vector<LayerSpec> spec;
  for (const std::string& tok : split(s, ',')) {
    if (tok.empty()) continue;
    const std::vector<std::string> f = split(tok, ':');
    const std::string& name = f[0];
    if (name == "conv") {
      require(f.size() >= 3, Errc::invalid_argument, "arch: conv needs filters and kernel dims");
      const auto [kh, kw] = parse_dims(f[2], "conv kernel");
      int stride = 1;
      Padding pad = Padding::valid;
      for (size_t k = 3; k < f.size(); ++k) {
        if (f[k] == "same")
          pad = Padding::same;
        else if (f[k] == "valid")
          pad = Padding::valid;
        else if (!f[k].empty() && f[k][0] == 's')
          stride = parse_int(f[k].substr(1), "conv stride");
        else
          fail(Errc::invalid_argument, "arch: unknown conv option '" + f[k] + "'");
      }
      spec.push_back(LayerSpec::conv2d(parse_int(f[1], "conv filters"), kh, kw, stride, pad));
    } else if (name == "maxpool" || name == "avgpool") {
      require(f.size() == 2, Errc::invalid_argument, "arch: pool needs a window");
      const auto [ph, pw] = parse_dims(f[1], "pool window");
      spec.push_back(name == "maxpool" ? LayerSpec::max_pool(ph, pw) : LayerSpec::avg_pool(ph, pw));
    } else if (name == "dense") {
      require(f.size() == 2, Errc::invalid_argument, "arch: dense needs a width");
      spec.push_back(LayerSpec::dense(parse_int(f[1], "dense width")));
    } else if (name == "relu") {
      spec.push_back(LayerSpec::activation(Activation::relu));
    } else if (name == "identity") {
      spec.push_back(LayerSpec::activation(Activation::identity));
    } else if (name == "flatten") {
      spec.push_back(LayerSpec::flatten());
    } else {
      fail(Errc::invalid_argument, "arch: unknown layer '" + name + "'");
    }
  }
  require(!spec.empty(), Errc::invalid_argument, "arch: empty spec");
  return spec;
}

std::string format_arch(const std::vector<LayerSpec>& spec) {
  std::ostringstream os;
  bool first = true;
  for (const LayerSpec& l : spec) {
    if (!first) os << ',';
    first = false;
    switch (l.kind) {
      case LayerKind::conv2d:
        os << "conv:" << l.filters << ':' << l.kh << 'x' << l.kw;
        if (l.stride != 1) os << ":s" << l.stride;
        if (l.padding == Padding::same) os << ":same";
        break;
      case LayerKind::max_pool: os << "maxpool:" << l.ph << 'x' << l.pw; break;
      case LayerKind::avg_pool: os << "avgpool:" << l.ph << 'x' << l.pw; break;
      case LayerKind::dense: os << "dense:" << l.width; break;
      case LayerKind::activation: os << to_string(l.act); break;
      case LayerKind::flatten: os << "flatten"; break;
    }
  }
  return os.str();
}

}  // namespace hds::nn
