#include "invgan/covering.hpp"

#include "invgan/fit.hpp"
#include "invgan/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace invgan {

Eigen::Index FarthestPointOrder::count_for(double eps) const {
  for (std::size_t k = 0; k < radius.size(); ++k)
    if (radius[k] <= eps) return static_cast<Eigen::Index>(k + 1);
  throw std::invalid_argument("traversal stopped before reaching this epsilon");
}

FarthestPointOrder farthest_point_order(const Cloud& points, double stop_eps) {
  if (points.cols() == 0) throw std::invalid_argument("empty point cloud");
  if (!(stop_eps > 0.0)) throw std::invalid_argument("epsilon must be positive");
  FarthestPointOrder fpo;
  Vec min_dist = Vec::Constant(points.cols(), std::numeric_limits<double>::infinity());
  Eigen::Index next = 0;
  while (true) {
    fpo.centers.push_back(next);
    const Vec center = points.col(next);
    const auto best = kernels::relax_and_argmax(points, center, min_dist);
    fpo.radius.push_back(best.value);
    if (best.value <= stop_eps) break;
    next = best.index;
  }
  return fpo;
}

std::vector<Eigen::Index> greedy_epsilon_net(const Cloud& points, double eps) {
  return farthest_point_order(points, eps).centers;
}

double covering_radius(const Cloud& points, const std::vector<Eigen::Index>& centers) {
  Vec min_dist = Vec::Constant(points.cols(), std::numeric_limits<double>::infinity());
  double r = 0.0;
  for (Eigen::Index c : centers) r = kernels::serial::relax_and_argmax(points, points.col(c), min_dist).value;
  return centers.empty() ? std::numeric_limits<double>::infinity() : r;
}

CoveringReport covering_numbers(const Cloud& points, const std::vector<double>& epsilons) {
  if (epsilons.empty()) throw std::invalid_argument("no epsilons given");
  const double smallest = *std::min_element(epsilons.begin(), epsilons.end());
  const auto fpo = farthest_point_order(points, smallest);
  CoveringReport rep;
  rep.epsilons = epsilons;
  for (double e : epsilons) rep.counts.push_back(fpo.count_for(e));
  return rep;
}

double covering_ratio_check(const DomainSpec& spec, double eps, Eigen::Index cloud_size, std::uint64_t seed) {
  Rng rng(seed);
  const Cloud x0 = sample_X0_cloud(spec, cloud_size, rng);
  const auto n0 = static_cast<double>(greedy_epsilon_net(x0, eps).size());
  if (spec.group.order() == 1) return 1.0;
  const Cloud x = orbit_cloud(spec.group, x0);
  const auto n = static_cast<double>(greedy_epsilon_net(x, eps).size());
  return n0 / n;
}

double dimension_slope(const Cloud& points, const std::vector<double>& epsilons) {
  if (epsilons.size() < 4) throw std::invalid_argument("dimension fit needs at least 4 epsilons");
  std::vector<double> sorted = epsilons;
  std::sort(sorted.begin(), sorted.end());
  if (!(sorted.front() > 0.0)) throw std::invalid_argument("epsilons must be positive");
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw std::invalid_argument("epsilons must be distinct");
  if (sorted.back() / sorted.front() < 8.0) throw std::invalid_argument("epsilon grid spans less than a factor of 8");
  const auto rep = covering_numbers(points, epsilons);
  std::vector<double> x, y;
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    x.push_back(std::log(1.0 / epsilons[i]));
    y.push_back(std::log(static_cast<double>(rep.counts[i])));
  }
  return least_squares(x, y).slope;
}

}  // namespace invgan
