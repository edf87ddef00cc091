#pragma once

// Integral probability metrics over finite function families, the neural
// (discriminator) estimate, and the symmetrization equality check.

#include "invgan/measure.hpp"
#include "invgan/network.hpp"

#include <cstdint>
#include <vector>

namespace invgan {

struct FunctionFamily {
  std::vector<ScalarFn> functions;
  double lipschitz_bound = 1.0;  // H
  double sup_bound = 1.0;        // M
};

struct FamilyCheck {
  bool lipschitz_ok = true;
  bool sup_ok = true;
  double worst_lipschitz_ratio = 0.0;  // max |f(x)-f(y)| / |x-y|
  double worst_sup = 0.0;
  bool ok() const { return lipschitz_ok && sup_ok; }
};

/// Empirical Lipschitz and sup checks on every pair of columns of `points`.
FamilyCheck check_family(const FunctionFamily& family, const Cloud& points);

/// max over the family of E_nu f - E_mu f. Throws on an empty family.
double ipm_finite(const FunctionFamily& family, const EmpiricalMeasure& nu, const EmpiricalMeasure& mu);

/// Whether f(sigma x) == f(x) (to `tol`, relative to 1+|f(x)|) for all
/// sigma and all columns of `points`.
bool is_invariant_on(const FiniteGroup& g, const ScalarFn& f, const Cloud& points, double tol = 1e-12);

struct Lemma1Result {
  double lhs = 0.0;     // IPM over Gamma between S^Sigma[nu] and S^Sigma[mu]
  double rhs = 0.0;     // IPM over the invariant members of Gamma between nu and mu
  double direct = 0.0;  // IPM over Gamma between nu and mu
  std::size_t family_size = 0;
  std::size_t invariant_members = 0;
};

/// Gamma = F together with S_Sigma[F]. Members of F are classified as
/// invariant by checking them on the orbits of both supports.
Lemma1Result lemma1_check(const FiniteGroup& g, const std::vector<ScalarFn>& seed_family,
                          const EmpiricalMeasure& nu, const EmpiricalMeasure& mu);

struct NeuralIpmConfig {
  int steps = 2000;
  double step_size = 0.01;
  double clip = 1.0;  // K
  std::uint64_t seed = 0;
  bool reinit = true;  // draw fresh weights from the seed instead of using the template's
};

struct NeuralIpmResult {
  double estimate = 0.0;  // best objective seen
  double final_objective = 0.0;
  InvariantDiscriminator best;
};

/// E_nu D - E_mu D for the discriminator D.
double disc_objective(const InvariantDiscriminator& d, const EmpiricalMeasure& nu, const EmpiricalMeasure& mu);

/// Full-batch gradient ascent on the objective, clipping after every step.
NeuralIpmResult neural_ipm(const InvariantDiscriminator& disc_template, const EmpiricalMeasure& nu,
                           const EmpiricalMeasure& mu, const NeuralIpmConfig& cfg = {});

/// Largest |D(a_i) - D(b_j)| / |a_i - b_j| over all cross pairs.
double pairwise_lipschitz(const InvariantDiscriminator& d, const Cloud& a, const Cloud& b);

}  // namespace invgan
