#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "common.hpp"

namespace hds::bench {

enum class FnId {
  griewank,
  levy,
  weierstrass,
  bent_cigar,
  rotated_hyper_ellipsoid,
  rosenbrock,
  hgbat,
  sum_squares,
  happycat,
  dixon_price,
  shan_wang,
  expanded_griewank_rosenbrock,
};

// Alternate readings of two formulas that differ between sources; the
// registry defaults are what this project treats as canonical.
struct EvalOptions {
  bool happycat_cec = false;         // 0.5 quadratic coefficient instead of 0.45
  bool dixon_price_standard = false; // classic form: (x1-1)^2 + sum_{i=2} i(2x_i^2 - x_{i-1})^2
};

struct BenchmarkFn {
  FnId fn;
  std::string id;
  double lo, hi;  // published interval, applied per dimension
  int min_d;
};

const std::vector<BenchmarkFn>& registry();
const BenchmarkFn& find(std::string_view id);

double evaluate(const BenchmarkFn& fn, std::span<const double> x, const EvalOptions& opt = {});

}  // namespace hds::bench
