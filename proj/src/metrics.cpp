#include "metrics.hpp"

#include <cmath>
#include <cstdio>
#include <nlohmann/json.hpp>

namespace hds::metrics {

namespace {

void check_pair(std::span<const double> y, std::span<const double> yhat) {
  require(y.size() == yhat.size(), Errc::shape_mismatch, "metrics: length mismatch");
  require(y.size() >= 2, Errc::invalid_argument, "metrics: need at least two samples");
}

double mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double variance_about_mean(std::span<const double> y) {
  const double m = mean(y);
  double s = 0.0;
  for (double v : y) s += (v - m) * (v - m);
  return s / static_cast<double>(y.size());
}

}  // namespace

double raae(std::span<const double> y, std::span<const double> yhat) {
  check_pair(y, yhat);
  const double sd = std::sqrt(variance_about_mean(y));
  require(sd > 0.0, Errc::undefined_metric, "raae: labels have zero standard deviation");
  double s = 0.0;
  for (size_t i = 0; i < y.size(); ++i) s += std::fabs(y[i] - yhat[i]);
  return s / (static_cast<double>(y.size()) * sd);
}

double rmae(std::span<const double> y, std::span<const double> yhat) {
  check_pair(y, yhat);
  const double sd = std::sqrt(variance_about_mean(y));
  require(sd > 0.0, Errc::undefined_metric, "rmae: labels have zero standard deviation");
  double m = 0.0;
  for (size_t i = 0; i < y.size(); ++i) m = std::max(m, std::fabs(y[i] - yhat[i]));
  return m / sd;
}

double r2(std::span<const double> y, std::span<const double> yhat) {
  check_pair(y, yhat);
  const double var = variance_about_mean(y);
  require(var > 0.0, Errc::undefined_metric, "r2: labels have zero variance");
  double sse = 0.0;
  for (size_t i = 0; i < y.size(); ++i) sse += (y[i] - yhat[i]) * (y[i] - yhat[i]);
  const double n = static_cast<double>(y.size());
  return 1.0 - (sse / n) / var;
}

double rel_error(std::span<const double> y, std::span<const double> yhat) {
  require(y.size() == yhat.size(), Errc::shape_mismatch, "metrics: length mismatch");
  require(!y.empty(), Errc::invalid_argument, "metrics: empty inputs");
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < y.size(); ++i) {
    num += (yhat[i] - y[i]) * (yhat[i] - y[i]);
    den += y[i] * y[i];
  }
  require(den > 0.0, Errc::undefined_metric, "rel_error: labels have zero norm");
  return std::sqrt(num / den) * 100.0;
}

Report report(std::span<const double> y, std::span<const double> yhat) {
  Report r;
  r.raae = raae(y, yhat);
  r.rmae = rmae(y, yhat);
  r.r2 = r2(y, yhat);
  r.error_pct = rel_error(y, yhat);
  r.n = static_cast<int>(y.size());
  r.std_dev = std::sqrt(variance_about_mean(y));
  return r;
}

std::string to_json(const Report& r) {
  nlohmann::json j;
  j["raae"] = r.raae;
  j["rmae"] = r.rmae;
  j["r2"] = r.r2;
  j["error_pct"] = r.error_pct;
  j["n"] = r.n;
  j["std"] = r.std_dev;
  return j.dump(2);
}

Report report_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
    Report r;
    r.raae = j.at("raae").get<double>();
    r.rmae = j.at("rmae").get<double>();
    r.r2 = j.at("r2").get<double>();
    r.error_pct = j.at("error_pct").get<double>();
    r.n = j.at("n").get<int>();
    r.std_dev = j.at("std").get<double>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::io_error, std::string("metrics: bad report JSON: ") + e.what());
  }
}

std::string format_table(const Report& r) {
  char buf[256];
  std::string out = "      RAAE       RMAE         R2   Error(%)          n\n";
  std::snprintf(buf, sizeof buf, "%10.6f %10.6f %10.6f %10.4f %10d\n", r.raae, r.rmae, r.r2,
                r.error_pct, r.n);
  out += buf;
  return out;
}

}  // namespace hds::metrics
