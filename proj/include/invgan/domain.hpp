#pragma once

// Domains X = Sigma x X0: the fundamental domain X0, the projection T0 onto
// it, and an empirical check of the boundary-set condition on X0.

#include "invgan/group.hpp"
#include "invgan/measure.hpp"

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace invgan {

using PointPredicate = std::function<bool(const Vec&)>;

struct DomainSpec {
  std::string name;
  int dim = 0;
  FiniteGroup group;
  PointPredicate in_X;
  PointPredicate in_X0;
  /// Euclidean distance from a point to X0 (used to break boundary ties).
  std::function<double(const Vec&)> dist_to_X0;
  /// Uniform sampler on X0.
  std::function<Vec(Rng&)> sample_X0;
  double diameter_X0 = 0.0;
};

/// mirror_square, disk_sector_<k>, box_<d>, ball_<d>, circle_in_R3.
DomainSpec builtin_domain(const std::string& name);

struct Projection {
  Vec x0;
  std::size_t sigma;  // group element index with x = sigma * x0
};

/// T0: the orbit representative of x in X0. Candidates sigma_i^{-1} x are
/// tried in element order; if floating-point noise leaves no exact hit, the
/// smallest index whose candidate lies within 1e-9 of X0 wins.
Projection project_T0(const DomainSpec& spec, const Vec& x);

/// (T0)_# mu.
EmpiricalMeasure pushforward_to_domain(const DomainSpec& spec, const EmpiricalMeasure& mu);

/// Uniform cloud on X0 with one point per column.
Cloud sample_X0_cloud(const DomainSpec& spec, Eigen::Index n, Rng& rng);

struct Assumption2Row {
  double epsilon;
  Eigen::Index n_violating;
  Eigen::Index n_A0;  // greedy net size of the violating set
  Eigen::Index n_X0;  // greedy net size of the X0 cloud
};

struct Assumption2Report {
  std::vector<Assumption2Row> rows;
  double fitted_r = 0.0;
};

/// For each epsilon, marks cloud points x with |x - tau x'| <= 2 eps for some
/// cloud point x' and non-identity tau (the pairs violating separation under
/// distinct group elements), covers them with a greedy eps-net, and fits r as
/// the slope of log(N_A0 / N_X0) against log eps over rows with N_A0 > 0
/// (r = 0 when every row is empty).
Assumption2Report check_assumption2(const DomainSpec& spec, const std::vector<double>& epsilons,
                                    Eigen::Index cloud_size, std::uint64_t seed);

/// Columns: epsilon,n_violating,N_A0,N_X0,fitted_r.
void write_assumption2_csv(std::ostream& os, const Assumption2Report& rep);

}  // namespace invgan
