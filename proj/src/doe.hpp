#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bench.hpp"
#include "common.hpp"

namespace hds::doe {

struct Dataset {
  int n = 0, d = 0;
  std::vector<double> X;  // n x d, row-major
  std::vector<double> y;  // n
  std::vector<std::pair<double, double>> bounds;  // per dimension
  int grid_h = 0, grid_w = 0;
  std::uint64_t seed = 0;
  std::string fn_id;  // empty when labels don't come from a registry function

  std::span<const double> row(int i) const {
    return {X.data() + static_cast<std::size_t>(i) * d, static_cast<std::size_t>(d)};
  }
};

// i.i.d. per-coordinate uniform draws; one bounds pair applied to every
// dimension or one per dimension. Identical seeds give identical matrices.
std::vector<double> sample_uniform(int n, int d, std::span<const std::pair<double, double>> bounds,
                                   std::uint64_t seed);
std::vector<double> sample_uniform(int n, int d, std::pair<double, double> bounds,
                                   std::uint64_t seed);
// Latin hypercube alternative (one stratified draw per row and dimension).
std::vector<double> sample_lhs(int n, int d, std::span<const std::pair<double, double>> bounds,
                               std::uint64_t seed);

// Smallest m >= d admitting m = H*W with H <= W <= 2H; ties broken toward the
// most-square pair. The trailing m-d grid cells are padding.
std::pair<int, int> grid_shape(int d);

Dataset build_dataset(const bench::BenchmarkFn& fn, int n, int d, std::uint64_t seed,
                      const bench::EvalOptions& opt = {}, bool lhs = false);

// CSV with header x1,...,xd,y plus a JSON sidecar `<path>.meta.json` holding
// bounds, seed, grid shape, and the function id. Round-trips losslessly.
void write_dataset(const Dataset& ds, const std::string& csv_path);
Dataset read_dataset(const std::string& csv_path);

}  // namespace hds::doe
