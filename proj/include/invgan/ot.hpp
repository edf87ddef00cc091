#pragma once

// Exact optimal transport: a shortest-augmenting-path assignment solver for
// equal-size uniform measures and a network simplex for integer-supply
// transportation problems.

#include "invgan/group.hpp"
#include "invgan/measure.hpp"

#include <cstdint>
#include <vector>

namespace invgan {

/// Largest per-side point count accepted by the exact solvers.
inline constexpr Eigen::Index kExactOtCap = 4000;

/// Largest common weight denominator accepted by the flow path.
inline constexpr std::int64_t kMaxDenominator = 1000000;

struct AssignmentResult {
  std::vector<Eigen::Index> row_to_col;
  double cost = 0.0;
};

/// Minimum-cost perfect matching on a square cost matrix.
AssignmentResult solve_assignment(const Mat& cost);

struct FlowEntry {
  Eigen::Index source;
  Eigen::Index sink;
  std::int64_t amount;
};

struct TransportResult {
  double cost = 0.0;  // sum of amount * cost over the plan
  std::vector<FlowEntry> plan;
  std::int64_t pivots = 0;
};

/// Min-cost transportation with integer supplies (sum supply == sum demand).
/// cost(i, j) is the unit cost from source i to sink j.
TransportResult solve_transport(const Mat& cost, const std::vector<std::int64_t>& supply,
                                const std::vector<std::int64_t>& demand);

/// Scales both weight vectors to integers over their least common
/// denominator. Throws PrecisionError if any weight is not a fraction with
/// denominator <= kMaxDenominator or the common denominator exceeds it.
std::int64_t rationalize(const Vec& a, const Vec& b, std::vector<std::int64_t>& ia, std::vector<std::int64_t>& ib);

/// Exact W1 with Euclidean ground cost. Equal-size uniform measures use the
/// assignment solver; everything else goes through the network simplex.
double wasserstein1_exact(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu);

/// The two routes individually, for cross-checking.
double wasserstein1_assignment(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu);
double wasserstein1_flow(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu);

/// Exact transport cost for a caller-supplied cost matrix.
double transport_cost(const Mat& cost, const Vec& wa, const Vec& wb);

/// W1(S^Sigma[mu], S^Sigma[nu]) for an orthogonal group, computed as the
/// transport cost between mu and nu under c(x, y) = min_sigma |x - sigma y|
/// (Kantorovich duality on the orbit space). Avoids materializing the
/// |Sigma|-fold orbit clouds.
double wasserstein1_symmetrized(const FiniteGroup& g, const EmpiricalMeasure& mu, const EmpiricalMeasure& nu);

}  // namespace invgan
