#include "invgan/training.hpp"

#include "invgan/measure.hpp"
#include "invgan/ot.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

namespace invgan {

namespace {

enum SeedStream : std::uint64_t { kInitDisc = 1, kInitGen = 2, kData = 3, kBatches = 4, kEval = 5, kLatent = 6 };

long ceil_pos(double v) { return static_cast<long>(std::ceil(v - 1e-12)); }

std::vector<int> chain(int in, int width, int depth, int out) {
  std::vector<int> w{in};
  for (int i = 0; i < depth; ++i) w.push_back(width);
  w.push_back(out);
  return w;
}

// First k entries of a uniformly shuffled 0..n-1 (partial Fisher-Yates).
std::vector<Eigen::Index> draw_without_replacement(std::vector<Eigen::Index>& pool, int k, Rng& rng) {
  const auto n = static_cast<Eigen::Index>(pool.size());
  const Eigen::Index take = std::min<Eigen::Index>(k, n);
  for (Eigen::Index i = 0; i < take; ++i) {
    std::uniform_int_distribution<Eigen::Index> pick(i, n - 1);
    std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(pick(rng))]);
  }
  return {pool.begin(), pool.begin() + take};
}

}  // namespace

Scalings default_scalings(long n, int d, double c) {
  if (n < 2 || d < 1 || !(c > 0.0)) throw std::invalid_argument("default_scalings needs n >= 2, d >= 1, c > 0");
  const double ln = std::log(static_cast<double>(n));
  Scalings s;
  s.L1 = std::max(2L, ceil_pos(c * ln));
  s.N1 = std::max(1L, ceil_pos(c * static_cast<double>(n) * ln));
  s.W1 = std::max(2L, ceil_pos(std::sqrt(c * static_cast<double>(n))));
  s.L2 = std::max(2L, ceil_pos(c * ln));
  s.W2 = std::max(7L * d + 1, ceil_pos(std::sqrt(c * static_cast<double>(n) / static_cast<double>(s.L2))));
  const double m = std::ceil(std::pow(static_cast<double>(n), 2.0 + 2.0 / d) * ln * ln * ln);
  s.m_min = m >= 1.8e19 ? std::numeric_limits<std::uint64_t>::max() : static_cast<std::uint64_t>(m);
  return s;
}

std::string to_string(OptimizerKind k) { return k == OptimizerKind::rms ? "rms" : "sgd"; }

OptimizerKind optimizer_from_string(const std::string& s) {
  if (s == "rms") return OptimizerKind::rms;
  if (s == "sgd") return OptimizerKind::sgd;
  throw std::invalid_argument("unknown optimizer '" + s + "'");
}

Optimizer::Optimizer(OptimizerKind kind, double lr, double decay, double eps)
    : kind_(kind), lr_(lr), decay_(decay), eps_(eps) {
  if (!(lr > 0.0)) throw std::invalid_argument("learning rate must be positive");
}

void Optimizer::step(Vec& params, const Vec& grad, double direction) {
  if (kind_ == OptimizerKind::sgd) {
    params += direction * lr_ * grad;
    return;
  }
  if (v_.size() != grad.size()) v_ = Vec::Zero(grad.size());
  v_ = decay_ * v_ + (1.0 - decay_) * grad.cwiseAbs2();
  params += direction * lr_ * grad.cwiseQuotient((v_.cwiseSqrt().array() + eps_).matrix());
}

void TrainConfig::validate() const {
  if (n < 1 || d < 1) throw std::invalid_argument("n and d must be positive");
  if (effective_m() < n) throw std::invalid_argument("m must be at least n");
  if (disc_width < 1 || disc_depth < 1 || gen_width < 1 || gen_depth < 1)
    throw std::invalid_argument("network widths and depths must be positive");
  if (!(clip > 0.0) || !(disc_lr > 0.0) || !(gen_lr > 0.0)) throw std::invalid_argument("clip and learning rates must be positive");
  if (disc_steps < 1 || gen_steps < 0 || batch < 1 || log_every < 1)
    throw std::invalid_argument("step counts and batch size must be positive");
  if (claim_transport_capacity && (gen_width < 7 * d + 1 || gen_depth < 2))
    throw std::invalid_argument("transport capacity needs generator width >= 7d+1 and depth >= 2");
}

nlohmann::json to_json(const TrainConfig& c) {
  return {{"n", c.n},
          {"m", c.effective_m()},
          {"d", c.d},
          {"disc_width", c.disc_width},
          {"disc_depth", c.disc_depth},
          {"clip", c.clip},
          {"gen_width", c.gen_width},
          {"gen_depth", c.gen_depth},
          {"disc_lr", c.disc_lr},
          {"gen_lr", c.gen_lr},
          {"disc_steps", c.disc_steps},
          {"gen_steps", c.gen_steps},
          {"batch", c.batch},
          {"log_every", c.log_every},
          {"optimizer", to_string(c.optimizer)},
          {"disc_mode", to_string(c.disc_mode)},
          {"seed", c.seed},
          {"group", c.group},
          {"target", c.target},
          {"claim_transport_capacity", c.claim_transport_capacity}};
}

nlohmann::json RunRecord::to_json() const {
  return {{"config", config},
          {"epochs", epochs},
          {"objective", objective},
          {"final_w1", final_w1},
          {"wall_seconds", wall_seconds},
          {"seeds", seeds},
          {"m_below_theory", m_below_theory},
          {"diverged", diverged}};
}

RunRecord RunRecord::from_json(const nlohmann::json& j) {
  RunRecord r;
  r.config = j.at("config");
  r.epochs = j.at("epochs").get<std::vector<long>>();
  r.objective = j.at("objective").get<std::vector<double>>();
  r.final_w1 = j.at("final_w1").get<double>();
  r.wall_seconds = j.at("wall_seconds").get<double>();
  r.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  r.m_below_theory = j.at("m_below_theory").get<bool>();
  r.diverged = j.at("diverged").get<bool>();
  return r;
}

bool RunRecord::same_result(const RunRecord& o) const {
  return config == o.config && epochs == o.epochs && objective == o.objective && final_w1 == o.final_w1 &&
         seeds == o.seeds && m_below_theory == o.m_below_theory && diverged == o.diverged;
}

LatentSampler uniform_latent() {
  return [](Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); };
}

LossGrad disc_objective_grad(const InvariantDiscriminator& d, const Mat& real, const Mat& fake) {
  const double br = static_cast<double>(real.cols()), bf = static_cast<double>(fake.cols());
  LossGrad out;
  out.loss = d.forward_batch(fake).mean() - d.forward_batch(real).mean();
  NetGradients g = d.backward_batch(fake, Vec::Constant(fake.cols(), 1.0 / bf));
  NetGradients gr = d.backward_batch(real, Vec::Constant(real.cols(), -1.0 / br));
  g.add(gr);
  out.grad = g.flat();
  return out;
}

LossGrad generator_loss_grad(const InvariantGenerator& g, const InvariantDiscriminator& d, const Vec& z,
                             const std::vector<std::size_t>& sigmas) {
  const Mat fake = g.generate_with(z, sigmas);
  const double b = static_cast<double>(z.size());
  LossGrad out;
  out.loss = d.forward_batch(fake).mean();
  const Mat dx = d.backward_batch(fake, Vec::Constant(z.size(), 1.0 / b)).dx;
  // The applied element is a fixed linear layer: pull back through its transpose.
  Mat up(dx.rows(), dx.cols());
  for (Eigen::Index j = 0; j < z.size(); ++j)
    up.col(j) = g.group().element(sigmas[static_cast<std::size_t>(j)]).matrix.transpose() * dx.col(j);
  out.grad = g.base().backward_batch(z.transpose(), up).flat();
  return out;
}

Cloud training_targets(const TrainConfig& cfg, const PointSampler& target) {
  Rng data(mix_seed(cfg.seed, {kData}));
  Cloud real(cfg.d, cfg.n);
  for (Eigen::Index j = 0; j < cfg.n; ++j) real.col(j) = target(data);
  return real;
}

TrainResult train_gan(const TrainConfig& cfg, const PointSampler& target, const LatentSampler& source, long n_eval) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const FiniteGroup group = group_from_descriptor(cfg.group, cfg.d);

  RunRecord rec;
  rec.config = to_json(cfg);
  for (auto s : {kInitDisc, kInitGen, kData, kBatches, kEval, kLatent}) rec.seeds.push_back(mix_seed(cfg.seed, {s}));
  rec.m_below_theory =
      cfg.n >= 2 && static_cast<std::uint64_t>(cfg.effective_m()) < default_scalings(cfg.n, cfg.d).m_min;

  Rng init_d(rec.seeds[0]), init_g(rec.seeds[1]), latent_rng(rec.seeds[5]), batches(rec.seeds[3]);
  InvariantDiscriminator disc(ReluNet::glorot(chain(cfg.d, cfg.disc_width, cfg.disc_depth, 1), init_d, cfg.clip), group,
                              cfg.disc_mode);
  InvariantGenerator gen(ReluNet::glorot(chain(1, cfg.gen_width, cfg.gen_depth, cfg.d), init_g), group);

  const Cloud real = training_targets(cfg, target);
  const long m = cfg.effective_m();
  Vec latent(m);
  for (Eigen::Index j = 0; j < m; ++j) latent(j) = source(latent_rng);

  std::vector<Eigen::Index> real_pool(static_cast<std::size_t>(cfg.n)), latent_pool(static_cast<std::size_t>(m));
  std::iota(real_pool.begin(), real_pool.end(), 0);
  std::iota(latent_pool.begin(), latent_pool.end(), 0);

  auto latent_batch = [&] {
    const auto idx = draw_without_replacement(latent_pool, cfg.batch, batches);
    Vec z(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) z(static_cast<Eigen::Index>(k)) = latent(idx[k]);
    return z;
  };
  auto diverge = [&](const std::string& what) {
    rec.diverged = true;
    rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    throw TrainingDiverged(what, rec);
  };

  Optimizer dopt(cfg.optimizer, cfg.disc_lr), gopt(cfg.optimizer, cfg.gen_lr);
  Vec dparams = disc.base().parameters(), gparams = gen.base().parameters();
  for (long step = 0; step < cfg.gen_steps; ++step) {
    double objective = 0.0;
    for (int k = 0; k < cfg.disc_steps; ++k) {
      const auto ridx = draw_without_replacement(real_pool, cfg.batch, batches);
      Mat rb(cfg.d, static_cast<Eigen::Index>(ridx.size()));
      for (std::size_t q = 0; q < ridx.size(); ++q) rb.col(static_cast<Eigen::Index>(q)) = real.col(ridx[q]);
      const Mat fb = gen.generate_batch(latent_batch(), batches);
      const LossGrad lg = disc_objective_grad(disc, rb, fb);
      if (!std::isfinite(lg.loss) || !lg.grad.allFinite()) diverge("non-finite discriminator objective");
      objective = lg.loss;
      dopt.step(dparams, lg.grad, +1.0);
      disc.base().set_parameters(dparams);
      clip_weights(disc.base(), cfg.clip);
      dparams = disc.base().parameters();
    }
    const Vec z = latent_batch();
    std::vector<std::size_t> sig(static_cast<std::size_t>(z.size()));
    for (auto& s : sig) s = haar_sample_index(group, batches);
    const LossGrad lg = generator_loss_grad(gen, disc, z, sig);
    if (!std::isfinite(lg.loss) || !lg.grad.allFinite()) diverge("non-finite generator loss");
    gopt.step(gparams, lg.grad, -1.0);
    gen.base().set_parameters(gparams);
    if (step % cfg.log_every == 0 || step + 1 == cfg.gen_steps) {
      rec.epochs.push_back(step);
      rec.objective.push_back(objective);
    }
  }

  if (n_eval > 0) rec.final_w1 = evaluate_generator(gen, target, source, n_eval, rec.seeds[4]).mean;
  rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {std::move(gen), std::move(disc), std::move(rec)};
}

EvalResult evaluate_generator(const InvariantGenerator& g, const PointSampler& target, const LatentSampler& source,
                              long n_eval, std::uint64_t seed, int repeats) {
  if (n_eval < 1 || repeats < 1) throw std::invalid_argument("n_eval and repeats must be positive");
  if (n_eval > static_cast<long>(kExactOtCap)) throw std::invalid_argument("n_eval exceeds the exact transport cap");
  EvalResult out;
  for (int r = 0; r < repeats; ++r) {
    Rng rng(mix_seed(seed, {static_cast<std::uint64_t>(r)}));
    Vec z(n_eval);
    for (Eigen::Index j = 0; j < n_eval; ++j) z(j) = source(rng);
    const Mat fake = g.generate_batch(z, rng);
    Cloud real(g.group().dim(), n_eval);
    for (Eigen::Index j = 0; j < n_eval; ++j) real.col(j) = target(rng);
    out.values.push_back(wasserstein1_exact(EmpiricalMeasure::uniform(fake), EmpiricalMeasure::uniform(real)));
  }
  const double k = static_cast<double>(out.values.size());
  out.mean = std::accumulate(out.values.begin(), out.values.end(), 0.0) / k;
  double ss = 0.0;
  for (double v : out.values) ss += (v - out.mean) * (v - out.mean);
  out.sd = out.values.size() > 1 ? std::sqrt(ss / (k - 1.0)) : 0.0;
  return out;
}

}  // namespace invgan
