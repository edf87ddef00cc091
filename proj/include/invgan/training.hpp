#pragma once

// The alternating minimax loop with invariant discriminators and generators,
// generator evaluation, and the architecture-scaling helpers.

#include "invgan/network.hpp"
#include "invgan/rng.hpp"

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace invgan {

struct Scalings {
  long L1 = 0;  // discriminator depth
  long N1 = 0;  // discriminator weight budget
  long W1 = 0;  // discriminator width
  long W2 = 0;  // generator width
  long L2 = 0;  // generator depth
  std::uint64_t m_min = 0;  // source sample count n^(2+2/d) (ln n)^3 (saturates)
};

/// L1 = L2 = max(2, ceil(c ln n)); N1 = ceil(c n ln n); W1 = max(2, ceil(sqrt(c n)))
/// so that L1 * W1^2 ~ N1; W2 = max(7d + 1, ceil(sqrt(c n / L2)));
/// m_min = ceil(n^(2 + 2/d) (ln n)^3).
Scalings default_scalings(long n, int d, double c = 1.0);

enum class OptimizerKind { rms, sgd };

std::string to_string(OptimizerKind k);
OptimizerKind optimizer_from_string(const std::string& s);

/// Momentum-free RMS-style adaptive step, or plain SGD.
class Optimizer {
 public:
  Optimizer(OptimizerKind kind, double lr, double decay = 0.9, double eps = 1e-8);
  /// params += direction * lr * scaled(grad); direction is +1 to ascend.
  void step(Vec& params, const Vec& grad, double direction);

 private:
  OptimizerKind kind_;
  double lr_, decay_, eps_;
  Vec v_;
};

struct TrainConfig {
  long n = 64;
  long m = 0;  // 0 selects 50 n
  int d = 2;
  int disc_width = 32;
  int disc_depth = 2;
  double clip = 0.5;
  int gen_width = 32;
  int gen_depth = 2;
  double disc_lr = 1e-3;
  double gen_lr = 1e-3;
  int disc_steps = 5;
  int gen_steps = 1000;
  int batch = 64;
  int log_every = 10;
  OptimizerKind optimizer = OptimizerKind::rms;
  DiscMode disc_mode = DiscMode::orbit_average;
  std::uint64_t seed = 0;
  std::string group = "trivial";
  std::string target = "ring_mixture";
  bool claim_transport_capacity = false;

  long effective_m() const { return m > 0 ? m : 50 * n; }
  /// Throws std::invalid_argument when an invariant is violated.
  void validate() const;
};

nlohmann::json to_json(const TrainConfig& c);

struct RunRecord {
  nlohmann::json config;
  std::vector<long> epochs;        // generator step of each trace entry
  std::vector<double> objective;   // discriminator objective at that step
  double final_w1 = -1.0;          // evaluation W1, -1 when not evaluated
  double wall_seconds = 0.0;
  std::vector<std::uint64_t> seeds;  // init_disc, init_gen, data, batches, evaluation, latent
  bool m_below_theory = false;     // m < m_min of default_scalings
  bool diverged = false;

  nlohmann::json to_json() const;
  static RunRecord from_json(const nlohmann::json& j);
  /// Equality of everything except wall time.
  bool same_result(const RunRecord& o) const;
};

class TrainingDiverged : public std::runtime_error {
 public:
  TrainingDiverged(const std::string& what, RunRecord record)
      : std::runtime_error(what), record_(std::move(record)) {}
  const RunRecord& record() const { return record_; }

 private:
  RunRecord record_;
};

using PointSampler = std::function<Vec(Rng&)>;
using LatentSampler = std::function<double(Rng&)>;

/// Uniform(0, 1) latent.
LatentSampler uniform_latent();

struct LossGrad {
  double loss = 0.0;
  Vec grad;  // flattened base-network parameters
};

/// E_fake D - E_real D over the given columns and its gradient with respect to
/// the discriminator base parameters.
LossGrad disc_objective_grad(const InvariantDiscriminator& d, const Mat& real, const Mat& fake);

/// Mean of D(sigma_j g(z_j)) with the elements fixed, and its gradient with
/// respect to the generator base parameters.
LossGrad generator_loss_grad(const InvariantGenerator& g, const InvariantDiscriminator& d, const Vec& z,
                             const std::vector<std::size_t>& sigmas);

/// The n target samples train_gan trains on for this config.
Cloud training_targets(const TrainConfig& cfg, const PointSampler& target);

struct TrainResult {
  InvariantGenerator generator;
  InvariantDiscriminator discriminator;
  RunRecord record;
};

/// Alternating optimization: disc_steps ascent steps on the objective (with
/// clipping after each) per generator descent step. Deterministic in
/// cfg.seed. Throws TrainingDiverged on a non-finite objective. When n_eval
/// is positive the generator is evaluated against fresh target samples.
TrainResult train_gan(const TrainConfig& cfg, const PointSampler& target, const LatentSampler& source,
                      long n_eval = 0);

struct EvalResult {
  double mean = 0.0;
  double sd = 0.0;
  std::vector<double> values;
};

/// Exact W1 between n_eval generated samples and n_eval fresh target samples,
/// repeated `repeats` times.
EvalResult evaluate_generator(const InvariantGenerator& g, const PointSampler& target, const LatentSampler& source,
                              long n_eval, std::uint64_t seed, int repeats = 1);

}  // namespace invgan
