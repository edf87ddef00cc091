#include "invgan/ipm.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace invgan {

FamilyCheck check_family(const FunctionFamily& family, const Cloud& points) {
  FamilyCheck out;
  for (const auto& f : family.functions) {
    std::vector<double> vals(static_cast<std::size_t>(points.cols()));
    for (Eigen::Index i = 0; i < points.cols(); ++i) {
      vals[static_cast<std::size_t>(i)] = f(points.col(i));
      out.worst_sup = std::max(out.worst_sup, std::abs(vals[static_cast<std::size_t>(i)]));
    }
    for (Eigen::Index i = 0; i < points.cols(); ++i)
      for (Eigen::Index j = i + 1; j < points.cols(); ++j) {
        const double dist = (points.col(i) - points.col(j)).norm();
        if (dist <= 0.0) continue;
        const double diff = std::abs(vals[static_cast<std::size_t>(i)] - vals[static_cast<std::size_t>(j)]);
        out.worst_lipschitz_ratio = std::max(out.worst_lipschitz_ratio, diff / dist);
        if (diff > family.lipschitz_bound * dist * (1 + 1e-6)) out.lipschitz_ok = false;
      }
  }
  out.sup_ok = out.worst_sup <= family.sup_bound;
  return out;
}

double ipm_finite(const FunctionFamily& family, const EmpiricalMeasure& nu, const EmpiricalMeasure& mu) {
  if (family.functions.empty()) throw std::invalid_argument("function family is empty");
  if (nu.dim() != mu.dim()) throw std::invalid_argument("measure dimension mismatch");
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& f : family.functions) best = std::max(best, nu.expect(f) - mu.expect(f));
  return best;
}

bool is_invariant_on(const FiniteGroup& g, const ScalarFn& f, const Cloud& points, double tol) {
  for (Eigen::Index j = 0; j < points.cols(); ++j) {
    const Vec x = points.col(j);
    const double fx = f(x);
    for (const auto& e : g.elements())
      if (std::abs(f(e.matrix * x) - fx) > tol * (1.0 + std::abs(fx))) return false;
  }
  return true;
}

Lemma1Result lemma1_check(const FiniteGroup& g, const std::vector<ScalarFn>& seed_family,
                          const EmpiricalMeasure& nu, const EmpiricalMeasure& mu) {
  if (seed_family.empty()) throw std::invalid_argument("seed family is empty");
  Cloud support(nu.dim(), nu.size() + mu.size());
  support << nu.points(), mu.points();
  const Cloud orbits = orbit_cloud(g, support);

  FunctionFamily gamma, invariant;
  for (const auto& f : seed_family) {
    gamma.functions.push_back(f);
    if (is_invariant_on(g, f, orbits)) invariant.functions.push_back(f);
  }
  for (const auto& f : seed_family) {
    ScalarFn s = symmetrize_function(g, f);
    gamma.functions.push_back(s);
    invariant.functions.push_back(s);
  }

  Lemma1Result r;
  r.family_size = gamma.functions.size();
  r.invariant_members = invariant.functions.size();
  r.lhs = ipm_finite(gamma, symmetrize_measure(g, nu), symmetrize_measure(g, mu));
  r.rhs = ipm_finite(invariant, nu, mu);
  r.direct = ipm_finite(gamma, nu, mu);
  return r;
}

double disc_objective(const InvariantDiscriminator& d, const EmpiricalMeasure& nu, const EmpiricalMeasure& mu) {
  return d.forward_batch(nu.points()).dot(nu.weights()) - d.forward_batch(mu.points()).dot(mu.weights());
}

NeuralIpmResult neural_ipm(const InvariantDiscriminator& disc_template, const EmpiricalMeasure& nu,
                           const EmpiricalMeasure& mu, const NeuralIpmConfig& cfg) {
  if (cfg.steps < 0 || !(cfg.step_size > 0.0) || !(cfg.clip > 0.0)) throw std::invalid_argument("invalid neural IPM config");
  InvariantDiscriminator d = disc_template;
  if (cfg.reinit) {
    Rng rng(cfg.seed);
    d.base() = ReluNet::glorot(disc_template.base().widths(), rng);
  }
  clip_weights(d.base(), cfg.clip);
  NeuralIpmResult out{disc_objective(d, nu, mu), 0.0, d};
  for (int s = 0; s < cfg.steps; ++s) {
    NetGradients g = d.backward_batch(nu.points(), nu.weights());
    NetGradients gm = d.backward_batch(mu.points(), mu.weights());
    gm.scale(-1.0);
    g.add(gm);
    d.base().set_parameters(d.base().parameters() + cfg.step_size * g.flat());
    clip_weights(d.base(), cfg.clip);
    const double obj = disc_objective(d, nu, mu);
    if (obj > out.estimate) {
      out.estimate = obj;
      out.best = d;
    }
  }
  out.final_objective = disc_objective(d, nu, mu);
  return out;
}

double pairwise_lipschitz(const InvariantDiscriminator& d, const Cloud& a, const Cloud& b) {
  const Vec fa = d.forward_batch(a), fb = d.forward_batch(b);
  double best = 0.0;
  for (Eigen::Index i = 0; i < a.cols(); ++i)
    for (Eigen::Index j = 0; j < b.cols(); ++j) {
      const double dist = (a.col(i) - b.col(j)).norm();
      if (dist > 0.0) best = std::max(best, std::abs(fa(i) - fb(j)) / dist);
    }
  return best;
}

}  // namespace invgan
