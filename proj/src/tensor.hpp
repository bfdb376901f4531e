#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "common.hpp"

namespace hds::nn {

// Dense row-major tensor of doubles.
struct Tensor {
  std::vector<int> shape;
  std::vector<double> data;

  Tensor() = default;
  explicit Tensor(std::vector<int> s) : shape(std::move(s)), data(checked_size(shape), 0.0) {}
  Tensor(std::vector<int> s, std::vector<double> d) : shape(std::move(s)), data(std::move(d)) {
    require(static_cast<std::int64_t>(data.size()) == checked_size(shape), Errc::shape_mismatch,
            "tensor data length does not match shape");
  }

  static std::int64_t checked_size(const std::vector<int>& s) {
    require(!s.empty(), Errc::shape_mismatch, "tensor shape must be non-empty");
    std::int64_t n = 1;
    for (int v : s) {
      require(v > 0, Errc::shape_mismatch, "tensor dims must be positive");
      n *= v;
    }
    return n;
  }

  std::int64_t size() const { return static_cast<std::int64_t>(data.size()); }
  double* ptr() { return data.data(); }
  const double* ptr() const { return data.data(); }
  void zero() { std::fill(data.begin(), data.end(), 0.0); }
  bool same_shape(const Tensor& o) const { return shape == o.shape; }

  bool all_finite() const {
    for (double v : data)
      if (!std::isfinite(v)) return false;
    return true;
  }

  bool operator==(const Tensor&) const = default;
};

}  // namespace hds::nn
