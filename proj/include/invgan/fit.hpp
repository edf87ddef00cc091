#pragma once

#include <utility>
#include <vector>

namespace invgan {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Ordinary least squares y ~ slope * x + intercept. r2 is 1 when y is
/// exactly constant.
LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y);

/// OLS on (ln n, ln error). Needs at least 3 pairs, all positive.
LinearFit rate_fit(const std::vector<std::pair<double, double>>& pairs);

double median(std::vector<double> v);

}  // namespace invgan
