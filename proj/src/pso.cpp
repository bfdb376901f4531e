#include "pso.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace hds::pso {

PsoResult pso_minimize(const Objective& f, std::span<const std::pair<double, double>> bounds,
                       const PsoConfig& cfg) {
  const int d = static_cast<int>(bounds.size());
  require(d >= 1, Errc::invalid_argument, "pso: empty bounds");
  require(cfg.population >= 2, Errc::invalid_argument, "pso: population must be >= 2");
  require(cfg.iterations >= 1, Errc::invalid_argument, "pso: iterations must be >= 1");
  require(cfg.inertia > 0.0 && cfg.inertia < 1.0, Errc::invalid_argument,
          "pso: inertia must lie in (0,1)");
  require(cfg.cognitive > 0.0 && cfg.social > 0.0, Errc::invalid_argument,
          "pso: cognitive/social coefficients must be positive");
  for (const auto& [lo, hi] : bounds)
    require(std::isfinite(lo) && std::isfinite(hi) && lo <= hi, Errc::invalid_argument,
            "pso: bounds must be finite with lo <= hi");

  const int P = cfg.population;
  std::mt19937_64 g = rng::make_stream(cfg.seed, rng::Stream::pso);
  std::vector<double> x(static_cast<std::size_t>(P) * d), v(x.size());
  std::vector<double> vmax(d);
  for (int j = 0; j < d; ++j) vmax[j] = cfg.clamp_fraction * (bounds[j].second - bounds[j].first);
  for (int i = 0; i < P; ++i)
    for (int j = 0; j < d; ++j) {
      x[static_cast<std::size_t>(i) * d + j] =
          rng::uniform(g, bounds[j].first, bounds[j].second);
      v[static_cast<std::size_t>(i) * d + j] = rng::uniform(g, -vmax[j], vmax[j]);
    }

  PsoResult res;
  res.best_value = std::numeric_limits<double>::infinity();
  std::vector<double> pbest = x, pval(P);
  auto eval = [&](int i, int iter) {
    const double val = f({x.data() + static_cast<std::size_t>(i) * d, static_cast<std::size_t>(d)});
    ++res.evaluations;
    require(std::isfinite(val), Errc::numeric_error,
            "pso: non-finite objective at particle " + std::to_string(i) + ", iteration " +
                std::to_string(iter));
    return val;
  };

  for (int i = 0; i < P; ++i) {
    pval[i] = eval(i, 0);
    if (pval[i] < res.best_value) {
      res.best_value = pval[i];
      res.best_point.assign(x.begin() + static_cast<std::size_t>(i) * d,
                            x.begin() + static_cast<std::size_t>(i + 1) * d);
    }
  }
  res.history.push_back(res.best_value);

  for (int iter = 1; iter <= cfg.iterations; ++iter) {
    for (int i = 0; i < P; ++i) {
      double* xi = x.data() + static_cast<std::size_t>(i) * d;
      double* vi = v.data() + static_cast<std::size_t>(i) * d;
      const double* pi = pbest.data() + static_cast<std::size_t>(i) * d;
      for (int j = 0; j < d; ++j) {
        const double r1 = rng::uniform01(g), r2 = rng::uniform01(g);
        double vel = cfg.inertia * vi[j] + cfg.cognitive * r1 * (pi[j] - xi[j]) +
                     cfg.social * r2 * (res.best_point[j] - xi[j]);
        vel = std::clamp(vel, -vmax[j], vmax[j]);
        vi[j] = vel;
        xi[j] = std::clamp(xi[j] + vel, bounds[j].first, bounds[j].second);
      }
      const double val = eval(i, iter);
      if (val < pval[i]) {
        pval[i] = val;
        std::copy_n(xi, d, pbest.begin() + static_cast<std::size_t>(i) * d);
        if (val < res.best_value) {
          res.best_value = val;
          res.best_point.assign(xi, xi + d);
        }
      }
    }
    res.history.push_back(res.best_value);
  }
  return res;
}

}  // namespace hds::pso
