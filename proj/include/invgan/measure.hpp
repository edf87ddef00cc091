#pragma once

// Weighted point sets and the symmetrization operators on measures and
// functions.

#include "invgan/group.hpp"
#include "invgan/types.hpp"

#include <functional>
#include <iosfwd>

namespace invgan {

using ScalarFn = std::function<double(const Vec&)>;

/// Weighted point set in R^d; weights are nonnegative and sum to 1.
class EmpiricalMeasure {
 public:
  EmpiricalMeasure(Cloud points, Vec weights);
  static EmpiricalMeasure uniform(Cloud points);

  int dim() const { return static_cast<int>(points_.rows()); }
  Eigen::Index size() const { return points_.cols(); }
  const Cloud& points() const { return points_; }
  const Vec& weights() const { return weights_; }
  Vec point(Eigen::Index i) const { return points_.col(i); }
  double weight(Eigen::Index i) const { return weights_(i); }

  /// True when every weight equals 1/size() exactly as stored.
  bool is_uniform() const;

  double expect(const ScalarFn& f) const;

 private:
  Cloud points_;
  Vec weights_;
};

/// Merges points closer than `tol` (first occurrence is the representative)
/// by adding their weights.
EmpiricalMeasure merge_duplicates(const EmpiricalMeasure& mu, double tol = kMatchTol);

/// Equality as weighted point multisets after merging, to `tol` in both point
/// position and weight.
bool approx_equal(const EmpiricalMeasure& a, const EmpiricalMeasure& b, double tol = kMatchTol);

/// Pushforward through a single group element.
EmpiricalMeasure transform(const GroupElement& e, const EmpiricalMeasure& mu);

/// S^Sigma[mu]: every point replaced by its orbit, weights w_i/|Sigma|,
/// coincident points merged.
EmpiricalMeasure symmetrize_measure(const FiniteGroup& g, const EmpiricalMeasure& mu);

/// S_Sigma[f](x) = (1/|Sigma|) sum_i f(sigma_i x).
ScalarFn symmetrize_function(const FiniteGroup& g, ScalarFn f);

/// CSV with header x_1,...,x_d[,weight]; the weight column is optional on
/// read (uniform weights when absent). Values are written in shortest
/// round-trip form.
void write_measure_csv(std::ostream& os, const EmpiricalMeasure& mu);
EmpiricalMeasure read_measure_csv(std::istream& is);

}  // namespace invgan
