#pragma once

// Epsilon-nets by greedy farthest-point traversal and the covering-number
// estimates built on them.

#include "invgan/domain.hpp"
#include "invgan/types.hpp"

#include <string>
#include <vector>

namespace invgan {

/// A farthest-point traversal: centers in selection order and, for each
/// prefix length k, the covering radius of the first k centers.
struct FarthestPointOrder {
  std::vector<Eigen::Index> centers;
  std::vector<double> radius;  // radius[k-1] = max_i dist(p_i, first k centers)

  /// Smallest prefix whose covering radius is <= eps.
  Eigen::Index count_for(double eps) const;
};

/// Traverses until the covering radius drops to `stop_eps` or below. Starts
/// at column 0; ties go to the smallest column index.
FarthestPointOrder farthest_point_order(const Cloud& points, double stop_eps);

/// Greedy eps-net: a subset of the columns such that every point lies within
/// eps of a center.
std::vector<Eigen::Index> greedy_epsilon_net(const Cloud& points, double eps);

/// max_i min_c |p_i - p_c|.
double covering_radius(const Cloud& points, const std::vector<Eigen::Index>& centers);

struct CoveringReport {
  std::vector<double> epsilons;
  std::vector<Eigen::Index> counts;
  std::string method = "greedy_farthest_point";
};

/// Net sizes for every epsilon from one traversal (counts are therefore
/// nonincreasing in epsilon).
CoveringReport covering_numbers(const Cloud& points, const std::vector<double>& epsilons);

/// N(X0, eps) / N(X, eps) from greedy nets on a uniform X0 cloud and its
/// orbit cloud.
double covering_ratio_check(const DomainSpec& spec, double eps, Eigen::Index cloud_size, std::uint64_t seed);

/// Least-squares slope of log N(eps) against log(1/eps). Needs >= 4 distinct
/// positive epsilons with max/min >= 8.
double dimension_slope(const Cloud& points, const std::vector<double>& epsilons);

}  // namespace invgan
