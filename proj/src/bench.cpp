#include "bench.hpp"

#include <cmath>
#include <numbers>

namespace hds::bench {

namespace {

constexpr double kPi = std::numbers::pi;

double griewank(std::span<const double> x) {
  double sum = 0.0, prod = 1.0;
  for (size_t i = 0; i < x.size(); ++i) {
    sum += x[i] * x[i] / 4000.0;
    prod *= std::cos(x[i] / std::sqrt(static_cast<double>(i + 1)));
  }
  return sum - prod + 1.0;
}

double levy(std::span<const double> x) {
  double sum = 0.0;
  for (double v : x) {
    const double s = std::sin(3.0 * kPi * v);
    sum += (v - 1.0) * (v - 1.0) * (1.0 + s * s);
  }
  return sum;
}

double weierstrass(std::span<const double> x) {
  constexpr int kmax = 20;
  constexpr double a = 0.5, b = 3.0;
  double ak[kmax + 1], bk[kmax + 1];
  ak[0] = 1.0;
  bk[0] = 1.0;
  for (int k = 1; k <= kmax; ++k) {
    ak[k] = ak[k - 1] * a;
    bk[k] = bk[k - 1] * b;
  }
  double centre = 0.0;
  for (int k = 0; k <= kmax; ++k) centre += ak[k] * std::cos(2.0 * kPi * bk[k] * 0.5);
  double sum = 0.0;
  for (double v : x) {
    double s = 0.0;
    for (int k = 0; k <= kmax; ++k) s += ak[k] * std::cos(2.0 * kPi * bk[k] * (v + 0.5));
    sum += s - centre;  // per-term subtraction keeps f(0) exactly zero
  }
  return sum;
}

double bent_cigar(std::span<const double> x) {
  double tail = 0.0;
  for (size_t i = 1; i < x.size(); ++i) tail += x[i] * x[i];
  return x[0] * x[0] + 1.0e6 * tail;
}

double rotated_hyper_ellipsoid(std::span<const double> x) {
  double running = 0.0, total = 0.0;
  for (double v : x) {
    running += v * v;
    total += running;
  }
  return total;
}

double rosenbrock(std::span<const double> x) {
  double sum = 0.0;
  for (size_t i = 0; i + 1 < x.size(); ++i) {
    const double t = x[i] * x[i] - x[i + 1];
    sum += 100.0 * t * t + (x[i] - 1.0) * (x[i] - 1.0);
  }
  return sum;
}

double hgbat(std::span<const double> x) {
  double s1 = 0.0, s2 = 0.0;
  for (double v : x) {
    s1 += v;
    s2 += v * v;
  }
  const double d = static_cast<double>(x.size());
  return std::sqrt(std::fabs(s2 * s2 - s1 * s1)) + (0.5 * s2 + s1) / d + 0.5;
}

double sum_squares(std::span<const double> x) {
  double sum = 0.0;
  for (size_t i = 0; i < x.size(); ++i) sum += static_cast<double>(i + 1) * x[i] * x[i];
  return sum;
}

double happycat(std::span<const double> x, double coeff) {
  double s1 = 0.0, s2 = 0.0;
  for (double v : x) {
    s1 += v;
    s2 += v * v;
  }
  const double d = static_cast<double>(x.size());
  return std::pow(std::fabs(s2 - d), 0.25) + (coeff * s2 + s1) / d + 0.5;
}

double dixon_price(std::span<const double> x, bool standard) {
  double sum = 0.0;
  if (standard) {
    sum = (x[0] - 1.0) * (x[0] - 1.0);
    for (size_t i = 1; i < x.size(); ++i) {
      const double t = 2.0 * x[i] * x[i] - x[i - 1];
      sum += static_cast<double>(i + 1) * t * t;
    }
  } else {
    for (double v : x) sum += (v - 1.0) * (v - 1.0);
    for (size_t i = 0; i + 1 < x.size(); ++i) {
      const double t = 2.0 * x[i + 1] * x[i + 1] - x[i];
      sum += static_cast<double>(i + 1) * t * t;
    }
  }
  return sum;
}

// (u^2)^(v^2+1) with an explicit zero-base rule; the exponent is always >= 1.
double sw_pow(double u, double v) {
  const double base = u * u;
  if (base == 0.0) return 0.0;
  return std::exp((v * v + 1.0) * std::log(base));
}

double shan_wang(std::span<const double> x) {
  double sum = 0.0;
  for (size_t i = 0; i + 1 < x.size(); ++i)
    sum += sw_pow(x[i], x[i + 1]) + sw_pow(x[i + 1], x[i]);
  return sum;
}

double griewank1(double t) { return t * t / 4000.0 - std::cos(t) + 1.0; }
double rosen2(double a, double b) {
  const double t = a * a - b;
  return 100.0 * t * t + (a - 1.0) * (a - 1.0);
}

double expanded_griewank_rosenbrock(std::span<const double> x) {
  const size_t d = x.size();
  double sum = 0.0;
  for (size_t i = 0; i < d; ++i) sum += griewank1(rosen2(x[i], x[(i + 1) % d]));
  return sum;
}

}  // namespace

const std::vector<BenchmarkFn>& registry() {
  static const std::vector<BenchmarkFn> fns = {
      {FnId::griewank, "griewank", -600.0, 600.0, 1},
      {FnId::levy, "levy", -10.0, 10.0, 1},
      {FnId::weierstrass, "weierstrass", -1.0, 1.0, 1},
      {FnId::bent_cigar, "bent_cigar", -10.0, 10.0, 1},
      {FnId::rotated_hyper_ellipsoid, "rotated_hyper_ellipsoid", -5.0, 5.0, 1},
      {FnId::rosenbrock, "rosenbrock", -10.0, 10.0, 2},
      {FnId::hgbat, "hgbat", -100.0, 100.0, 1},
      {FnId::sum_squares, "sum_squares", -10.0, 10.0, 1},
      {FnId::happycat, "happycat", -100.0, 100.0, 1},
      {FnId::dixon_price, "dixon_price", -10.0, 10.0, 1},
      {FnId::shan_wang, "shan_wang", 0.0, 1.0, 2},
      {FnId::expanded_griewank_rosenbrock, "expanded_griewank_rosenbrock", -1.0, 1.0, 2},
  };
  return fns;
}

const BenchmarkFn& find(std::string_view id) {
  for (const BenchmarkFn& f : registry())
    if (f.id == id) return f;
  fail(Errc::invalid_argument, "unknown benchmark '" + std::string(id) + "'");
}

double evaluate(const BenchmarkFn& fn, std::span<const double> x, const EvalOptions& opt) {
  require(static_cast<int>(x.size()) >= fn.min_d, Errc::invalid_argument,
          fn.id + ": needs at least " + std::to_string(fn.min_d) + " dimensions");
  switch (fn.fn) {
    case FnId::griewank: return griewank(x);
    case FnId::levy: return levy(x);
    case FnId::weierstrass: return weierstrass(x);
    case FnId::bent_cigar: return bent_cigar(x);
    case FnId::rotated_hyper_ellipsoid: return rotated_hyper_ellipsoid(x);
    case FnId::rosenbrock: return rosenbrock(x);
    case FnId::hgbat: return hgbat(x);
    case FnId::sum_squares: return sum_squares(x);
    case FnId::happycat: return happycat(x, opt.happycat_cec ? 0.5 : 0.45);
    case FnId::dixon_price: return dixon_price(x, opt.dixon_price_standard);
    case FnId::shan_wang: return shan_wang(x);
    case FnId::expanded_griewank_rosenbrock: return expanded_griewank_rosenbrock(x);
  }
  fail(Errc::invalid_argument, "unknown benchmark id");
}

}  // namespace hds::bench
