#pragma once

// Scaling-law sweeps, the verification suites, and their CSV / JSON / SVG
// outputs.

#include "invgan/config.hpp"
#include "invgan/fit.hpp"
#include "invgan/report.hpp"
#include "invgan/targets.hpp"
#include "invgan/training.hpp"

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace invgan {

/// Runs f(0..n-1) on up to `workers` threads (dynamic schedule). The first
/// exception thrown by any task is rethrown after all tasks finish.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& f);

// Seed streams outside the per-cell index space.
inline constexpr std::uint64_t kReferenceStream = 1000000;
inline constexpr std::uint64_t kFloorStream = 1000001;

// ---- Δ3 sweep --------------------------------------------------------------

struct Delta3Config {
  std::string target = "ring_mixture";
  TargetParams params;
  std::vector<std::string> groups{"trivial", "cyclic:2", "cyclic:4", "cyclic:8"};
  std::vector<long> n_grid{50, 100, 200, 400, 800, 1600};
  int trials = 10;
  long reference_size = 4000;
  bool measure_floor = true;
  std::uint64_t seed = 0;
  int workers = 1;
};

struct Delta3Row {
  std::string group;
  std::size_t group_size = 0;
  long n = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  double w1 = 0.0;
};

struct GroupFit {
  std::string group;
  std::size_t group_size = 0;
  LinearFit fit;
  double floor = -1.0;  // W1 between two independent symmetrized references, -1 if not measured
};

struct CollapseCell {
  std::size_t k = 0;
  long n = 0;
  double ratio = 0.0;  // mean err(|Sigma| = k, n) / mean err(|Sigma| = 1, k n)
};

struct SweepResult {
  std::vector<Delta3Row> rows;
  std::vector<GroupFit> fits;
  std::vector<CollapseCell> collapse;
  double collapse_median = 0.0;
};

/// Trial seed = mix_seed(seed, {group index, n index, trial}); the reference
/// uses mix_seed(seed, {kReferenceStream}). Every trial measures
/// W1(S^Sigma[mu_n], S^Sigma[reference]) exactly.
SweepResult delta3_sweep(const Delta3Config& cfg);
Delta3Config delta3_config_from(const Config& c);

/// Cell means of a sweep for one group, ordered by n.
std::vector<std::pair<double, double>> cell_means(const SweepResult& r, const std::string& group);

// ---- intrinsic-dimension sweep ---------------------------------------------

struct LowdimConfig {
  std::vector<long> n_grid{25, 50, 100, 200, 400, 800};
  int trials = 20;
  int replications = 3;
  long reference_size = 4000;
  std::uint64_t seed = 0;
  int workers = 1;
};

struct LowdimReplication {
  SweepResult circle, ball;
  double circle_slope = 0.0, ball_slope = 0.0;
};

/// Replication r runs a trivial-group sweep per target with master seed
/// mix_seed(seed, {r, target index}).
std::vector<LowdimReplication> lowdim_sweep(const LowdimConfig& cfg);
LowdimConfig lowdim_config_from(const Config& c);

// ---- GAN sweep --------------------------------------------------------------

struct GanSweepConfig {
  std::string target = "ring_mixture";
  TargetParams params;
  std::string invariant_group = "cyclic:4";
  std::vector<long> n_grid{500};
  int seeds = 5;
  long n_eval = 2000;
  long reference_size = 4000;
  TrainConfig train;  // n, seed and group are set per cell
  std::uint64_t seed = 0;
  int workers = 1;
};

struct GanRow {
  std::string arm;  // "invariant" or "vanilla"
  std::string group;
  long n = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  double w1 = -1.0;
  double delta3_floor = 0.0;  // W1(S^Sigma[mu_n], S^Sigma[reference]) on the training sample
  bool diverged = false;
  RunRecord record;
};

struct GanSweepResult {
  std::vector<GanRow> rows;
  double median_invariant = 0.0, median_vanilla = 0.0;
  double median_floor_invariant = 0.0, median_floor_vanilla = 0.0;
  int excluded = 0;
};

/// Both arms of a trial share the training seed mix_seed(seed, {n index, trial}).
GanSweepResult gan_sweep(const GanSweepConfig& cfg);
GanSweepConfig gan_config_from(const Config& c);

// ---- covering ---------------------------------------------------------------

struct CoveringConfig {
  std::string domain = "disk_sector_4";
  std::vector<double> epsilons{0.2, 0.1, 0.05, 0.025};
  long cloud_size = 20000;
  bool assumption2 = true;
  std::uint64_t seed = 0;
};

struct CoveringRow {
  double epsilon = 0.0;
  long count_X0 = 0, count_X = 0;
  double ratio = 0.0, bound = 0.0;  // bound = (1/|Sigma|)(1 + 0.15)
};

struct CoveringResult {
  std::vector<CoveringRow> rows;
  double slope_X0 = 0.0, slope_X = 0.0;
  double fitted_r = 0.0;
  bool has_r = false;
};

CoveringResult covering_experiment(const CoveringConfig& cfg);
CoveringConfig covering_config_from(const Config& c);

// ---- verification -------------------------------------------------------------

struct CheckResult {
  std::string suite, check;
  bool passed = false;
  std::string detail;
};

struct VerifyConfig {
  std::vector<std::string> suites;  // empty = all
  std::string inject_fault = "none";  // none | cayley
  std::uint64_t seed = 0;
};

const std::vector<std::string>& verify_suite_names();
std::vector<CheckResult> run_verify(const VerifyConfig& cfg);
VerifyConfig verify_config_from(const Config& c);

// ---- command outputs ------------------------------------------------------------

struct CommandOutput {
  Table results;
  nlohmann::json summary;
  std::string svg;
  bool ok = true;  // exit status of the command
};

/// Dispatches a CLI command. `seed` and `workers` (when set) override the
/// config file. Unknown config keys raise ConfigError before any work runs.
CommandOutput run_command(const std::string& command, const Config& config, std::optional<std::uint64_t> seed,
                          std::optional<int> workers);

/// Writes results.csv, summary.json and plot.svg into `dir` (created).
void write_outputs(const std::string& dir, const CommandOutput& out);

}  // namespace invgan
