#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "common.hpp"

namespace hds::pso {

struct PsoConfig {
  int population = 50;
  int iterations = 200;
  double inertia = 0.7;
  double cognitive = 1.5;
  double social = 1.5;
  double clamp_fraction = 0.2;  // velocity limit as a fraction of the box width
  std::uint64_t seed = 0;
};

struct PsoResult {
  std::vector<double> best_point;
  double best_value = 0.0;
  std::vector<double> history;  // best value after each iteration (0 = after init)
  std::int64_t evaluations = 0;
};

using Objective = std::function<double(std::span<const double>)>;

// Global-best PSO over a box. Positions are clamped to the box after every
// move, so every evaluated point satisfies the constraints exactly.
PsoResult pso_minimize(const Objective& f, std::span<const std::pair<double, double>> bounds,
                       const PsoConfig& cfg);

}  // namespace hds::pso
