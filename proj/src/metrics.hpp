#pragma once

#include <span>
#include <string>

#include "common.hpp"

namespace hds::metrics {

// Accuracy criteria for a predictor on one test set. STD and variance use the
// population convention (denominator n) so that r2 == 1 - mse/variance exactly.
struct Report {
  double raae = 0.0;
  double rmae = 0.0;
  double r2 = 0.0;
  double error_pct = 0.0;
  int n = 0;
  double std_dev = 0.0;
};

double raae(std::span<const double> y, std::span<const double> yhat);
double rmae(std::span<const double> y, std::span<const double> yhat);
double r2(std::span<const double> y, std::span<const double> yhat);
// L2 norm of the residual over the L2 norm of the labels, in percent.
double rel_error(std::span<const double> y, std::span<const double> yhat);

Report report(std::span<const double> y, std::span<const double> yhat);

std::string to_json(const Report& r);
Report report_from_json(const std::string& text);
// Fixed-width console table; header + one row.
std::string format_table(const Report& r);

}  // namespace hds::metrics
