#include "doe.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>
#include <numeric>
#include <sstream>

namespace hds::doe {

namespace {

void check_bounds(std::span<const std::pair<double, double>> bounds) {
  for (const auto& [lo, hi] : bounds)
    require(std::isfinite(lo) && std::isfinite(hi) && lo < hi, Errc::invalid_argument,
            "sampling bounds must be finite with lo < hi");
}

}  // namespace

std::vector<double> sample_uniform(int n, int d, std::span<const std::pair<double, double>> bounds,
                                   std::uint64_t seed) {
  require(n >= 1 && d >= 1, Errc::invalid_argument, "sample_uniform: n and d must be >= 1");
  require(static_cast<int>(bounds.size()) == d, Errc::shape_mismatch,
          "sample_uniform: one bounds pair per dimension");
  check_bounds(bounds);
  std::mt19937_64 g = rng::make_stream(seed, rng::Stream::sampling);
  std::vector<double> x(static_cast<std::size_t>(n) * d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j)
      x[static_cast<std::size_t>(i) * d + j] = rng::uniform(g, bounds[j].first, bounds[j].second);
  return x;
}

std::vector<double> sample_uniform(int n, int d, std::pair<double, double> bounds,
                                   std::uint64_t seed) {
  std::vector<std::pair<double, double>> b(static_cast<std::size_t>(d), bounds);
  return sample_uniform(n, d, b, seed);
}

std::vector<double> sample_lhs(int n, int d, std::span<const std::pair<double, double>> bounds,
                               std::uint64_t seed) {
  require(n >= 1 && d >= 1, Errc::invalid_argument, "sample_lhs: n and d must be >= 1");
  require(static_cast<int>(bounds.size()) == d, Errc::shape_mismatch,
          "sample_lhs: one bounds pair per dimension");
  check_bounds(bounds);
  std::mt19937_64 g = rng::make_stream(seed, rng::Stream::sampling);
  std::vector<double> x(static_cast<std::size_t>(n) * d);
  std::vector<int> perm(n);
  for (int j = 0; j < d; ++j) {
    std::iota(perm.begin(), perm.end(), 0);
    for (int i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng::below(g, i + 1)]);
    for (int i = 0; i < n; ++i) {
      const double u = (perm[i] + rng::uniform01(g)) / n;
      x[static_cast<std::size_t>(i) * d + j] =
          bounds[j].first + u * (bounds[j].second - bounds[j].first);
    }
  }
  return x;
}

std::pair<int, int> grid_shape(int d) {
  require(d >= 1, Errc::invalid_argument, "grid_shape: d must be >= 1");
  for (int m = d;; ++m) {
    for (int h = static_cast<int>(std::sqrt(static_cast<double>(m))); h >= 1; --h) {
      if (m % h != 0) continue;
      const int w = m / h;
      if (w <= 2 * h) return {h, w};  // first hit is the most-square pair
    }
  }
}

Dataset build_dataset(const bench::BenchmarkFn& fn, int n, int d, std::uint64_t seed,
                      const bench::EvalOptions& opt, bool lhs) {
  Dataset ds;
  ds.n = n;
  ds.d = d;
  ds.seed = seed;
  ds.fn_id = fn.id;
  ds.bounds.assign(static_cast<std::size_t>(d), {fn.lo, fn.hi});
  ds.X = lhs ? sample_lhs(n, d, ds.bounds, seed) : sample_uniform(n, d, ds.bounds, seed);
  ds.y.resize(n);
  for (int i = 0; i < n; ++i) ds.y[i] = bench::evaluate(fn, ds.row(i), opt);
  std::tie(ds.grid_h, ds.grid_w) = grid_shape(d);
  return ds;
}

void write_dataset(const Dataset& ds, const std::string& csv_path) {
  std::FILE* f = std::fopen(csv_path.c_str(), "w");
  require(f != nullptr, Errc::io_error, "cannot open for writing: " + csv_path);
  for (int j = 0; j < ds.d; ++j) std::fprintf(f, "x%d,", j + 1);
  std::fprintf(f, "y\n");
  for (int i = 0; i < ds.n; ++i) {
    const double* row = ds.X.data() + static_cast<std::size_t>(i) * ds.d;
    for (int j = 0; j < ds.d; ++j) std::fprintf(f, "%.17g,", row[j]);
    std::fprintf(f, "%.17g\n", ds.y[i]);
  }
  const bool ok = std::fflush(f) == 0;
  std::fclose(f);
  require(ok, Errc::io_error, "short write: " + csv_path);

  nlohmann::json meta;
  meta["n"] = ds.n;
  meta["d"] = ds.d;
  meta["seed"] = ds.seed;
  meta["grid"] = {ds.grid_h, ds.grid_w};
  meta["fn"] = ds.fn_id;
  nlohmann::json b = nlohmann::json::array();
  for (const auto& [lo, hi] : ds.bounds) b.push_back({lo, hi});
  meta["bounds"] = std::move(b);
  std::ofstream mf(csv_path + ".meta.json");
  require(mf.good(), Errc::io_error, "cannot open for writing: " + csv_path + ".meta.json");
  mf << meta.dump(2) << '\n';
  require(mf.good(), Errc::io_error, "short write: " + csv_path + ".meta.json");
}

Dataset read_dataset(const std::string& csv_path) {
  Dataset ds;
  {
    std::ifstream mf(csv_path + ".meta.json");
    require(mf.good(), Errc::io_error, "cannot open: " + csv_path + ".meta.json");
    nlohmann::json meta;
    try {
      meta = nlohmann::json::parse(mf);
      ds.n = meta.at("n").get<int>();
      ds.d = meta.at("d").get<int>();
      ds.seed = meta.at("seed").get<std::uint64_t>();
      const auto grid = meta.at("grid").get<std::vector<int>>();
      require(grid.size() == 2, Errc::io_error, "dataset meta: grid must have two entries");
      ds.grid_h = grid[0];
      ds.grid_w = grid[1];
      ds.fn_id = meta.at("fn").get<std::string>();
      for (const auto& pr : meta.at("bounds")) {
        const auto v = pr.get<std::vector<double>>();
        require(v.size() == 2, Errc::io_error, "dataset meta: bad bounds pair");
        ds.bounds.emplace_back(v[0], v[1]);
      }
    } catch (const nlohmann::json::exception& e) {
      fail(Errc::io_error, std::string("dataset meta: ") + e.what());
    }
    require(static_cast<int>(ds.bounds.size()) == ds.d, Errc::io_error,
            "dataset meta: bounds count != d");
  }

  std::ifstream f(csv_path);
  require(f.good(), Errc::io_error, "cannot open: " + csv_path);
  std::string line;
  require(static_cast<bool>(std::getline(f, line)), Errc::io_error, "dataset: missing header");
  ds.X.reserve(static_cast<std::size_t>(ds.n) * ds.d);
  ds.y.reserve(ds.n);
  int rows = 0;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    const char* p = line.c_str();
    for (int j = 0; j <= ds.d; ++j) {
      char* end = nullptr;
      const double v = std::strtod(p, &end);
      require(end != p, Errc::io_error, "dataset: bad number in row " + std::to_string(rows + 1));
      (j < ds.d ? ds.X : ds.y).push_back(v);
      p = end;
      if (*p == ',') ++p;
    }
    ++rows;
  }
  require(rows == ds.n, Errc::io_error, "dataset: row count does not match metadata");
  return ds;
}

}  // namespace hds::doe
