#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "doe.hpp"
#include "network.hpp"
#include "optim.hpp"

namespace hds::surrogate {

// Default net for a given grid: two same-padded 3x3 conv blocks, average
// pooling when the grid admits it, then a small dense head.
std::vector<nn::LayerSpec> default_arch(int grid_h, int grid_w);

struct CnnSurrogateConfig {
  std::optional<std::pair<int, int>> grid;  // override; defaults to doe::grid_shape(d)
  std::vector<nn::LayerSpec> arch;          // empty = default_arch for the grid
  nn::TrainConfig train;
  std::uint64_t init_seed = 0;              // weight-init stream seed
};

// Scalar-regression metamodel: inputs scaled per-dimension to [-1,1] from the
// dataset bounds, labels z-scored, vectors laid out on a zero-padded grid.
class CnnSurrogate {
 public:
  static CnnSurrogate fit(const CnnSurrogateConfig& cfg, const doe::Dataset& data,
                          nn::TrainResult* history = nullptr);

  int dim() const { return d_; }
  std::pair<int, int> grid() const { return {grid_h_, grid_w_}; }
  bool is_constant() const { return constant_; }
  const nn::Network& network() const { return net_; }

  double predict(std::span<const double> x) const;
  // X: n x d row-major; evaluates in fixed-size chunks.
  std::vector<double> predict_batch(std::span<const double> X, int n) const;

  std::string to_json() const;
  static CnnSurrogate from_json(const std::string& text);
  void save(const std::string& path) const;
  static CnnSurrogate load(const std::string& path);

  // Normalized grid tensor for n points (n x 1 x H x W); used by fit and tests.
  nn::Tensor to_grid(std::span<const double> X, int n) const;

 private:
  int d_ = 0, grid_h_ = 0, grid_w_ = 0;
  std::vector<double> lo_, hi_;  // per-dimension input bounds
  double mu_y_ = 0.0, sigma_y_ = 1.0;
  bool constant_ = false;
  double constant_value_ = 0.0;
  nn::Network net_;
};

}  // namespace hds::surrogate
