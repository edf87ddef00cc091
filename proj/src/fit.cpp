#include "invgan/fit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace invgan {

LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("least squares needs >= 2 paired values");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("least squares needs at least two distinct x values");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return f;
}

LinearFit rate_fit(const std::vector<std::pair<double, double>>& pairs) {
  if (pairs.size() < 3) throw std::invalid_argument("rate fit needs at least 3 pairs");
  std::vector<double> x, y;
  for (const auto& [n, err] : pairs) {
    if (!(n > 0.0) || !(err > 0.0)) throw std::invalid_argument("rate fit needs positive values");
    x.push_back(std::log(n));
    y.push_back(std::log(err));
  }
  return least_squares(x, y);
}

double median(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("median of empty list");
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace invgan
