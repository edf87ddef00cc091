#include "invgan/experiments.hpp"

#include "invgan/covering.hpp"
#include "invgan/domain.hpp"
#include "invgan/format.hpp"
#include "invgan/kernels.hpp"
#include "invgan/measure.hpp"
#include "invgan/ot.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>

namespace invgan {

void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& f) {
  if (workers < 1) throw std::invalid_argument("worker count must be positive");
  std::exception_ptr first;
  std::mutex mu;
  const auto count = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
  for (long i = 0; i < count; ++i) {
    try {
      f(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard<std::mutex> lock(mu);
      if (!first) first = std::current_exception();
    }
  }
  if (first) std::rethrow_exception(first);
}

namespace {

// Whether the target law is invariant under the group named by `desc`.
bool target_invariant_under(const Target& t, const std::string& desc) {
  if (desc == "trivial" || desc == t.invariance) return true;
  const auto tc = t.invariance.rfind("cyclic:", 0) == 0 ? std::stol(t.invariance.substr(7)) : 0;
  if (tc > 0 && desc.rfind("cyclic:", 0) == 0) {
    const long k = std::stol(desc.substr(7));
    return k > 0 && tc % k == 0;
  }
  return false;
}

void check_cap(long n, const std::string& what) {
  if (n < 1) throw ConfigError(what + " must be positive");
  if (n > static_cast<long>(kExactOtCap))
    throw ConfigError(what + " = " + std::to_string(n) + " exceeds the exact transport cap of " +
                      std::to_string(kExactOtCap));
}

// W1 between two symmetrized measures through the orbit-min cost; the
// general transport route avoids the cubic assignment solver on large
// equal-size references.
double symmetrized_flow(const FiniteGroup& g, const Cloud& a, const Cloud& b) {
  Mat c;
  kernels::blockwise_min_distance(a, orbit_cloud(g, b), static_cast<Eigen::Index>(g.order()), c);
  return transport_cost(c, Vec::Constant(a.cols(), 1.0 / static_cast<double>(a.cols())),
                        Vec::Constant(b.cols(), 1.0 / static_cast<double>(b.cols())));
}

TargetParams target_params_from(const Config& c) {
  TargetParams p;
  p.modes = static_cast<int>(c.get_int("target.modes", p.modes));
  p.radius = c.get_double("target.radius", p.radius);
  p.sd = c.get_double("target.sd", p.sd);
  return p;
}

nlohmann::json environment_echo(int workers) {
  return {{"compiler", __VERSION__},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION)},
          {"openmp_max_threads", omp_get_max_threads()},
          {"workers", workers}};
}

std::string sz(std::size_t v) { return std::to_string(v); }

}  // namespace

// ---- Δ3 --------------------------------------------------------------------

SweepResult delta3_sweep(const Delta3Config& cfg) {
  const Target target = builtin_target(cfg.target, cfg.params);
  if (cfg.groups.empty() || cfg.n_grid.empty() || cfg.trials < 1) throw ConfigError("empty sweep grid");
  check_cap(cfg.reference_size, "reference_size");
  for (long n : cfg.n_grid) check_cap(n, "n");
  std::vector<FiniteGroup> groups;
  for (const auto& desc : cfg.groups) {
    groups.push_back(group_from_descriptor(desc, target.dim));
    if (!target_invariant_under(target, desc))
      throw ConfigError("target '" + cfg.target + "' is not invariant under " + desc);
  }

  Rng ref_rng(mix_seed(cfg.seed, {kReferenceStream}));
  const Cloud ref = sample_cloud(target, cfg.reference_size, ref_rng);
  const EmpiricalMeasure ref_mu = EmpiricalMeasure::uniform(ref);

  SweepResult out;
  const std::size_t G = groups.size(), N = cfg.n_grid.size(), T = static_cast<std::size_t>(cfg.trials);
  out.rows.resize(G * N * T);
  parallel_for(out.rows.size(), cfg.workers, [&](std::size_t task) {
    const std::size_t gi = task / (N * T), ni = (task / T) % N, t = task % T;
    Delta3Row& row = out.rows[task];
    row.group = cfg.groups[gi];
    row.group_size = groups[gi].order();
    row.n = cfg.n_grid[ni];
    row.trial = static_cast<int>(t);
    row.seed = mix_seed(cfg.seed, {gi, ni, t});
    Rng rng(row.seed);
    const Cloud sample = sample_cloud(target, row.n, rng);
    row.w1 = wasserstein1_symmetrized(groups[gi], EmpiricalMeasure::uniform(sample), ref_mu);
  });

  std::vector<double> floors(G, -1.0);
  if (cfg.measure_floor) {
    Rng floor_rng(mix_seed(cfg.seed, {kFloorStream}));
    const Cloud ref2 = sample_cloud(target, cfg.reference_size, floor_rng);
    parallel_for(G, cfg.workers, [&](std::size_t gi) { floors[gi] = symmetrized_flow(groups[gi], ref, ref2); });
  }
  for (std::size_t gi = 0; gi < G; ++gi) {
    GroupFit f{cfg.groups[gi], groups[gi].order(), {}, floors[gi]};
    const auto means = cell_means(out, cfg.groups[gi]);
    f.fit = means.size() >= 3 ? rate_fit(means) : LinearFit{};
    out.fits.push_back(f);
  }

  // Collapse: compare |Sigma| = k at n with the trivial group at k n.
  std::map<std::pair<std::size_t, long>, double> mean_of;
  for (std::size_t gi = 0; gi < G; ++gi)
    for (const auto& [n, m] : cell_means(out, cfg.groups[gi])) mean_of[{groups[gi].order(), static_cast<long>(n)}] = m;
  std::vector<double> ratios;
  for (const auto& [key, m] : mean_of) {
    const auto [k, n] = key;
    if (k == 1) continue;
    const auto base = mean_of.find({1, static_cast<long>(k) * n});
    if (base == mean_of.end() || base->second <= 0.0) continue;
    out.collapse.push_back({k, n, m / base->second});
    ratios.push_back(m / base->second);
  }
  out.collapse_median = ratios.empty() ? 0.0 : median(ratios);
  return out;
}

std::vector<std::pair<double, double>> cell_means(const SweepResult& r, const std::string& group) {
  std::map<long, std::pair<double, int>> acc;
  for (const auto& row : r.rows) {
    if (row.group != group) continue;
    auto& a = acc[row.n];
    a.first += row.w1;
    a.second += 1;
  }
  std::vector<std::pair<double, double>> out;
  for (const auto& [n, a] : acc) out.emplace_back(static_cast<double>(n), a.first / a.second);
  return out;
}

Delta3Config delta3_config_from(const Config& c) {
  Delta3Config d;
  d.target = c.get_string("target", d.target);
  d.params = target_params_from(c);
  d.groups = c.get_string_list("groups", d.groups);
  d.n_grid = c.get_int_list("n_grid", d.n_grid);
  d.trials = static_cast<int>(c.get_int("trials", d.trials));
  d.reference_size = c.get_int("reference_size", d.reference_size);
  d.measure_floor = c.get_bool("measure_floor", d.measure_floor);
  d.seed = static_cast<std::uint64_t>(c.get_int("seed", 0));
  d.workers = static_cast<int>(c.get_int("workers", 1));
  return d;
}

// ---- lowdim ------------------------------------------------------------------

std::vector<LowdimReplication> lowdim_sweep(const LowdimConfig& cfg) {
  if (cfg.replications < 1) throw ConfigError("replications must be positive");
  std::vector<LowdimReplication> out;
  for (int r = 0; r < cfg.replications; ++r) {
    LowdimReplication rep;
    const char* names[] = {"circle_R3", "ball_R3"};
    for (std::uint64_t ti = 0; ti < 2; ++ti) {
      Delta3Config d;
      d.target = names[ti];
      d.groups = {"trivial"};
      d.n_grid = cfg.n_grid;
      d.trials = cfg.trials;
      d.reference_size = cfg.reference_size;
      d.measure_floor = false;
      d.seed = mix_seed(cfg.seed, {static_cast<std::uint64_t>(r), ti});
      d.workers = cfg.workers;
      (ti == 0 ? rep.circle : rep.ball) = delta3_sweep(d);
    }
    rep.circle_slope = rep.circle.fits.at(0).fit.slope;
    rep.ball_slope = rep.ball.fits.at(0).fit.slope;
    out.push_back(std::move(rep));
  }
  return out;
}

LowdimConfig lowdim_config_from(const Config& c) {
  LowdimConfig d;
  d.n_grid = c.get_int_list("n_grid", d.n_grid);
  d.trials = static_cast<int>(c.get_int("trials", d.trials));
  d.replications = static_cast<int>(c.get_int("replications", d.replications));
  d.reference_size = c.get_int("reference_size", d.reference_size);
  d.seed = static_cast<std::uint64_t>(c.get_int("seed", 0));
  d.workers = static_cast<int>(c.get_int("workers", 1));
  return d;
}

// ---- GAN ---------------------------------------------------------------------

GanSweepResult gan_sweep(const GanSweepConfig& cfg) {
  const Target target = builtin_target(cfg.target, cfg.params);
  if (!target_invariant_under(target, cfg.invariant_group))
    throw ConfigError("target '" + cfg.target + "' is not invariant under " + cfg.invariant_group);
  if (cfg.n_grid.empty() || cfg.seeds < 1) throw ConfigError("empty sweep grid");
  check_cap(cfg.n_eval, "n_eval");
  check_cap(cfg.reference_size, "reference_size");
  for (long n : cfg.n_grid) check_cap(n, "n");
  const FiniteGroup inv = group_from_descriptor(cfg.invariant_group, target.dim);
  const FiniteGroup triv = make_trivial_group(target.dim);

  Rng ref_rng(mix_seed(cfg.seed, {kReferenceStream}));
  const EmpiricalMeasure ref = EmpiricalMeasure::uniform(sample_cloud(target, cfg.reference_size, ref_rng));

  GanSweepResult out;
  const std::size_t N = cfg.n_grid.size(), T = static_cast<std::size_t>(cfg.seeds);
  out.rows.resize(N * T * 2);
  parallel_for(out.rows.size(), cfg.workers, [&](std::size_t task) {
    const std::size_t ni = task / (2 * T), t = (task / 2) % T, arm = task % 2;
    GanRow& row = out.rows[task];
    row.arm = arm == 0 ? "invariant" : "vanilla";
    row.group = arm == 0 ? cfg.invariant_group : "trivial";
    row.n = cfg.n_grid[ni];
    row.trial = static_cast<int>(t);
    row.seed = mix_seed(cfg.seed, {ni, t});
    TrainConfig tc = cfg.train;
    tc.n = row.n;
    tc.d = target.dim;
    tc.seed = row.seed;
    tc.group = row.group;
    tc.target = cfg.target;
    const FiniteGroup& g = arm == 0 ? inv : triv;
    row.delta3_floor = wasserstein1_symmetrized(g, EmpiricalMeasure::uniform(training_targets(tc, target.sample)), ref);
    try {
      auto res = train_gan(tc, target.sample, uniform_latent(), cfg.n_eval);
      row.w1 = res.record.final_w1;
      row.record = std::move(res.record);
    } catch (const TrainingDiverged& e) {
      row.diverged = true;
      row.record = e.record();
    }
  });

  std::vector<double> wi, wv, fi, fv;
  for (const auto& r : out.rows) {
    if (r.diverged) {
      ++out.excluded;
      continue;
    }
    (r.arm == "invariant" ? wi : wv).push_back(r.w1);
    (r.arm == "invariant" ? fi : fv).push_back(r.delta3_floor);
  }
  out.median_invariant = wi.empty() ? 0.0 : median(wi);
  out.median_vanilla = wv.empty() ? 0.0 : median(wv);
  out.median_floor_invariant = fi.empty() ? 0.0 : median(fi);
  out.median_floor_vanilla = fv.empty() ? 0.0 : median(fv);
  return out;
}

GanSweepConfig gan_config_from(const Config& c) {
  GanSweepConfig g;
  g.target = c.get_string("target", g.target);
  g.params = target_params_from(c);
  g.invariant_group = c.get_string("invariant_group", g.invariant_group);
  g.n_grid = c.get_int_list("n_grid", g.n_grid);
  g.seeds = static_cast<int>(c.get_int("seeds", g.seeds));
  g.n_eval = c.get_int("n_eval", g.n_eval);
  g.reference_size = c.get_int("reference_size", g.reference_size);
  TrainConfig& t = g.train;
  t.m = c.get_int("train.m", t.m);
  t.disc_width = static_cast<int>(c.get_int("train.disc_width", t.disc_width));
  t.disc_depth = static_cast<int>(c.get_int("train.disc_depth", t.disc_depth));
  t.clip = c.get_double("train.clip", t.clip);
  t.gen_width = static_cast<int>(c.get_int("train.gen_width", t.gen_width));
  t.gen_depth = static_cast<int>(c.get_int("train.gen_depth", t.gen_depth));
  t.disc_lr = c.get_double("train.disc_lr", t.disc_lr);
  t.gen_lr = c.get_double("train.gen_lr", t.gen_lr);
  t.disc_steps = static_cast<int>(c.get_int("train.disc_steps", t.disc_steps));
  t.gen_steps = static_cast<int>(c.get_int("train.gen_steps", t.gen_steps));
  t.batch = static_cast<int>(c.get_int("train.batch", t.batch));
  t.log_every = static_cast<int>(c.get_int("train.log_every", t.log_every));
  t.optimizer = optimizer_from_string(c.get_string("train.optimizer", to_string(t.optimizer)));
  t.disc_mode = disc_mode_from_string(c.get_string("train.disc_mode", to_string(t.disc_mode)));
  t.claim_transport_capacity = c.get_bool("train.claim_transport_capacity", t.claim_transport_capacity);
  g.seed = static_cast<std::uint64_t>(c.get_int("seed", 0));
  g.workers = static_cast<int>(c.get_int("workers", 1));
  return g;
}

// ---- covering ------------------------------------------------------------------

CoveringResult covering_experiment(const CoveringConfig& cfg) {
  const DomainSpec spec = builtin_domain(cfg.domain);
  if (cfg.epsilons.empty()) throw ConfigError("epsilons must not be empty");
  if (cfg.cloud_size < 1) throw ConfigError("cloud_size must be positive");
  for (double e : cfg.epsilons)
    if (!(e > 0.0)) throw ConfigError("epsilons must be positive");
  Rng rng(cfg.seed);
  const Cloud x0 = sample_X0_cloud(spec, cfg.cloud_size, rng);
  const Cloud x = orbit_cloud(spec.group, x0);
  const auto r0 = covering_numbers(x0, cfg.epsilons);
  const auto r1 = covering_numbers(x, cfg.epsilons);
  const double k = static_cast<double>(spec.group.order());
  CoveringResult out;
  std::vector<double> lx, l0, l1;
  for (std::size_t i = 0; i < cfg.epsilons.size(); ++i) {
    const double ratio = spec.group.order() == 1 ? 1.0 : static_cast<double>(r0.counts[i]) / r1.counts[i];
    out.rows.push_back({cfg.epsilons[i], static_cast<long>(r0.counts[i]), static_cast<long>(r1.counts[i]), ratio,
                        1.15 / k});
    lx.push_back(std::log(1.0 / cfg.epsilons[i]));
    l0.push_back(std::log(static_cast<double>(r0.counts[i])));
    l1.push_back(std::log(static_cast<double>(r1.counts[i])));
  }
  if (cfg.epsilons.size() >= 2) {
    out.slope_X0 = least_squares(lx, l0).slope;
    out.slope_X = least_squares(lx, l1).slope;
  }
  if (cfg.assumption2 && spec.group.order() > 1 && cfg.cloud_size >= 1000) {
    out.fitted_r = check_assumption2(spec, cfg.epsilons, cfg.cloud_size, cfg.seed).fitted_r;
    out.has_r = true;
  }
  return out;
}

CoveringConfig covering_config_from(const Config& c) {
  CoveringConfig d;
  d.domain = c.get_string("domain.name", d.domain);
  d.epsilons = c.get_double_list("epsilons", d.epsilons);
  d.cloud_size = c.get_int("cloud_size", d.cloud_size);
  d.assumption2 = c.get_bool("assumption2", d.assumption2);
  d.seed = static_cast<std::uint64_t>(c.get_int("seed", 0));
  c.get_int("workers", 1);
  return d;
}

// ---- commands --------------------------------------------------------------------

namespace {

nlohmann::json fit_json(const LinearFit& f) { return {{"slope", f.slope}, {"intercept", f.intercept}, {"r2", f.r2}}; }

CommandOutput delta3_output(const Delta3Config& cfg) {
  const SweepResult r = delta3_sweep(cfg);
  CommandOutput o;
  o.results.columns = {"group", "group_size", "n", "trial", "seed", "w1"};
  for (const auto& row : r.rows)
    o.results.add_row({row.group, sz(row.group_size), std::to_string(row.n), std::to_string(row.trial),
                       std::to_string(row.seed), fmt_double(row.w1)});
  nlohmann::json fits = nlohmann::json::array(), cells = nlohmann::json::array();
  std::vector<Series> series;
  for (const auto& f : r.fits) {
    nlohmann::json j = fit_json(f.fit);
    j["group"] = f.group;
    j["group_size"] = f.group_size;
    if (f.floor >= 0) j["reference_floor"] = f.floor;
    fits.push_back(j);
    Series s{f.group, {}, {}, f.fit};
    for (const auto& [n, m] : cell_means(r, f.group)) {
      s.x.push_back(n);
      s.y.push_back(m);
    }
    series.push_back(std::move(s));
  }
  for (const auto& c : r.collapse) cells.push_back({{"k", c.k}, {"n", c.n}, {"ratio", c.ratio}});
  o.summary = {{"command", "delta3-sweep"},
               {"config",
                {{"target", cfg.target},
                 {"groups", cfg.groups},
                 {"n_grid", cfg.n_grid},
                 {"trials", cfg.trials},
                 {"reference_size", cfg.reference_size},
                 {"seed", cfg.seed}}},
               {"fits", fits},
               {"collapse", {{"cells", cells}, {"median", r.collapse_median}}},
               {"excluded", 0},
               {"environment", environment_echo(cfg.workers)}};
  o.svg = loglog_svg("W1(S[mu_n], S[reference]) vs n", "n", "W1", series);
  return o;
}

CommandOutput lowdim_output(const LowdimConfig& cfg) {
  const auto reps = lowdim_sweep(cfg);
  CommandOutput o;
  o.results.columns = {"replication", "target", "n", "trial", "seed", "w1"};
  nlohmann::json rj = nlohmann::json::array();
  bool steeper = true;
  std::vector<Series> series;
  for (std::size_t r = 0; r < reps.size(); ++r) {
    for (const auto* sw : {&reps[r].circle, &reps[r].ball}) {
      const std::string name = sw == &reps[r].circle ? "circle_R3" : "ball_R3";
      for (const auto& row : sw->rows)
        o.results.add_row({sz(r), name, std::to_string(row.n), std::to_string(row.trial), std::to_string(row.seed),
                           fmt_double(row.w1)});
      if (r == 0) {
        Series s{name, {}, {}, sw->fits.at(0).fit};
        for (const auto& [n, m] : cell_means(*sw, "trivial")) {
          s.x.push_back(n);
          s.y.push_back(m);
        }
        series.push_back(std::move(s));
      }
    }
    steeper = steeper && reps[r].circle_slope < reps[r].ball_slope;
    rj.push_back({{"replication", r},
                  {"circle", fit_json(reps[r].circle.fits.at(0).fit)},
                  {"ball", fit_json(reps[r].ball.fits.at(0).fit)}});
  }
  o.summary = {{"command", "lowdim"},
               {"config",
                {{"n_grid", cfg.n_grid},
                 {"trials", cfg.trials},
                 {"replications", cfg.replications},
                 {"reference_size", cfg.reference_size},
                 {"seed", cfg.seed}}},
               {"replications", rj},
               {"circle_steeper_in_every_replication", steeper},
               {"excluded", 0},
               {"environment", environment_echo(cfg.workers)}};
  o.svg = loglog_svg("Intrinsic dimension: W1 vs n (replication 0)", "n", "W1", series);
  return o;
}

CommandOutput gan_output(const GanSweepConfig& cfg) {
  const GanSweepResult r = gan_sweep(cfg);
  CommandOutput o;
  o.results.columns = {"arm", "group", "n", "trial", "seed", "w1", "delta3_floor", "diverged"};
  nlohmann::json records = nlohmann::json::array();
  std::map<std::string, Series> by_arm;
  for (const auto& row : r.rows) {
    o.results.add_row({row.arm, row.group, std::to_string(row.n), std::to_string(row.trial), std::to_string(row.seed),
                       fmt_double(row.w1), fmt_double(row.delta3_floor), row.diverged ? "1" : "0"});
    records.push_back(row.record.to_json());
    if (!row.diverged) {
      auto& s = by_arm[row.arm];
      s.name = row.arm;
      s.x.push_back(static_cast<double>(row.n));
      s.y.push_back(row.w1);
      auto& f = by_arm[row.arm + " floor"];
      f.name = row.arm + " floor";
      f.x.push_back(static_cast<double>(row.n));
      f.y.push_back(row.delta3_floor);
    }
  }
  std::vector<Series> series;
  for (auto& [k, s] : by_arm) series.push_back(std::move(s));
  o.summary = {{"command", "gan-sweep"},
               {"config",
                {{"target", cfg.target},
                 {"invariant_group", cfg.invariant_group},
                 {"n_grid", cfg.n_grid},
                 {"seeds", cfg.seeds},
                 {"n_eval", cfg.n_eval},
                 {"seed", cfg.seed},
                 {"train", to_json(cfg.train)}}},
               {"median_w1", {{"invariant", r.median_invariant}, {"vanilla", r.median_vanilla}}},
               {"median_delta3_floor", {{"invariant", r.median_floor_invariant}, {"vanilla", r.median_floor_vanilla}}},
               {"excluded", r.excluded},
               {"records", records},
               {"environment", environment_echo(cfg.workers)}};
  o.svg = loglog_svg("GAN evaluation W1 per trial", "n", "W1", series);
  return o;
}

CommandOutput covering_output(const CoveringConfig& cfg) {
  const CoveringResult r = covering_experiment(cfg);
  CommandOutput o;
  o.results.columns = {"epsilon", "count_X0", "count_X", "ratio", "bound"};
  Series s0{"N(X0)", {}, {}, std::nullopt}, s1{"N(X)", {}, {}, std::nullopt};
  bool within = true;
  for (const auto& row : r.rows) {
    o.results.add_row({fmt_double(row.epsilon), std::to_string(row.count_X0), std::to_string(row.count_X),
                       fmt_double(row.ratio), fmt_double(row.bound)});
    within = within && row.ratio <= row.bound;
    s0.x.push_back(1.0 / row.epsilon);
    s0.y.push_back(static_cast<double>(row.count_X0));
    s1.x.push_back(1.0 / row.epsilon);
    s1.y.push_back(static_cast<double>(row.count_X));
  }
  nlohmann::json summary = {{"command", "covering"},
                            {"config",
                             {{"domain", cfg.domain},
                              {"epsilons", cfg.epsilons},
                              {"cloud_size", cfg.cloud_size},
                              {"seed", cfg.seed}}},
                            {"method", "greedy_farthest_point"},
                            {"slope_X0", r.slope_X0},
                            {"slope_X", r.slope_X},
                            {"ratio_within_bound", within},
                            {"environment", environment_echo(1)}};
  if (r.has_r) summary["assumption2_fitted_r"] = r.fitted_r;
  o.summary = summary;
  o.svg = loglog_svg("Greedy covering numbers on " + cfg.domain, "1/epsilon", "count", {s0, s1});
  return o;
}

CommandOutput verify_output(const VerifyConfig& cfg) {
  const auto checks = run_verify(cfg);
  CommandOutput o;
  o.results.columns = {"suite", "check", "passed", "detail"};
  std::map<std::string, bool> suites;
  std::vector<std::string> order;
  int failed = 0;
  for (const auto& c : checks) {
    std::string detail = c.detail;
    std::replace(detail.begin(), detail.end(), ',', ';');
    std::replace(detail.begin(), detail.end(), '\n', ' ');
    o.results.add_row({c.suite, c.check, c.passed ? "1" : "0", detail});
    if (!suites.count(c.suite)) {
      order.push_back(c.suite);
      suites[c.suite] = true;
    }
    suites[c.suite] = suites[c.suite] && c.passed;
    failed += c.passed ? 0 : 1;
  }
  nlohmann::json sj = nlohmann::json::object();
  std::vector<std::pair<std::string, bool>> status;
  for (const auto& s : order) {
    sj[s] = suites[s];
    status.emplace_back(s, suites[s]);
  }
  o.ok = failed == 0;
  o.summary = {{"command", "verify"},
               {"suites", sj},
               {"checks", checks.size()},
               {"failed", failed},
               {"inject_fault", cfg.inject_fault},
               {"environment", environment_echo(1)}};
  o.svg = status_svg("Verification suites", status);
  return o;
}

}  // namespace

namespace {

// Resolves names in a parsed config so that typos surface as ConfigError.
template <class F>
void as_config_error(F&& f) {
  try {
    f();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

void check_target_and_groups(const std::string& target, const TargetParams& params,
                             const std::vector<std::string>& groups) {
  as_config_error([&] {
    const Target t = builtin_target(target, params);
    for (const auto& g : groups) group_from_descriptor(g, t.dim);
  });
}

}  // namespace

CommandOutput run_command(const std::string& command, const Config& config, std::optional<std::uint64_t> seed,
                          std::optional<int> workers) {
  Config c = config;
  if (seed) c.set("seed", std::to_string(*seed));
  if (workers) c.set("workers", std::to_string(*workers));
  if (command == "delta3-sweep") {
    const auto cfg = delta3_config_from(c);
    c.reject_unknown();
    check_target_and_groups(cfg.target, cfg.params, cfg.groups);
    return delta3_output(cfg);
  }
  if (command == "lowdim") {
    const auto cfg = lowdim_config_from(c);
    c.reject_unknown();
    return lowdim_output(cfg);
  }
  if (command == "gan-sweep") {
    const auto cfg = gan_config_from(c);
    c.reject_unknown();
    check_target_and_groups(cfg.target, cfg.params, {cfg.invariant_group});
    return gan_output(cfg);
  }
  if (command == "covering") {
    const auto cfg = covering_config_from(c);
    c.reject_unknown();
    as_config_error([&] { builtin_domain(cfg.domain); });
    return covering_output(cfg);
  }
  if (command == "verify") {
    const auto cfg = verify_config_from(c);
    c.reject_unknown();
    return verify_output(cfg);
  }
  throw ConfigError("unknown command '" + command + "'");
}

void write_outputs(const std::string& dir, const CommandOutput& out) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path d(dir);
  std::ofstream csv(d / "results.csv", std::ios::binary);
  write_csv(csv, out.results);
  std::ofstream js(d / "summary.json", std::ios::binary);
  js << out.summary.dump(2) << '\n';
  std::ofstream svg(d / "plot.svg", std::ios::binary);
  svg << out.svg;
  if (!csv || !js || !svg) throw std::runtime_error("failed to write outputs to " + dir);
}

}  // namespace invgan
