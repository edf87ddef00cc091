#pragma once

// Fully-connected ReLU networks with hand-written backprop, the
// Sigma-invariant discriminator/generator wrappers, and the piecewise-linear
// transport map.

#include "invgan/group.hpp"
#include "invgan/rng.hpp"
#include "invgan/types.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace invgan {

/// Gradients of a scalar loss with respect to every layer's weights and
/// biases, plus the input.
struct NetGradients {
  std::vector<Mat> dW;
  std::vector<Vec> db;
  Mat dx;  // one column per input

  /// Flattened in parameter order (W row-major, then b, layer by layer).
  Vec flat() const;
  void add(const NetGradients& other);
  void scale(double s);
};

/// x -> W_L relu(W_{L-1} ... relu(W_0 x + b_0) ... + b_{L-1}) + b_L.
class ReluNet {
 public:
  ReluNet() = default;
  /// All-zero network with the given width chain (d_0, ..., d_{L+1}).
  explicit ReluNet(std::vector<int> widths);

  /// Uniform(-a, a) init with a = sqrt(6 / (fan_in + fan_out)), then clipped
  /// to the weight bound if one is given.
  static ReluNet glorot(std::vector<int> widths, Rng& rng, std::optional<double> weight_bound = std::nullopt);

  const std::vector<int>& widths() const { return widths_; }
  int input_dim() const { return widths_.front(); }
  int output_dim() const { return widths_.back(); }
  std::size_t layers() const { return weights_.size(); }

  Mat& weight(std::size_t i) { return weights_[i]; }
  const Mat& weight(std::size_t i) const { return weights_[i]; }
  Vec& bias(std::size_t i) { return biases_[i]; }
  const Vec& bias(std::size_t i) const { return biases_[i]; }

  std::optional<double> weight_bound() const { return bound_; }
  void set_weight_bound(std::optional<double> k) { bound_ = k; }

  Vec forward(const Vec& x) const;
  /// Column-wise forward pass.
  Mat forward_batch(const Mat& x) const;

  /// Gradients of sum_j upstream_j . forward(x_j) (columns). The ReLU
  /// subgradient at 0 is 0.
  NetGradients backward_batch(const Mat& x, const Mat& upstream) const;
  NetGradients backward(const Vec& x, const Vec& upstream) const;

  std::size_t parameter_count() const;
  Vec parameters() const;
  void set_parameters(const Vec& p);

  /// Largest |entry| over all weights and biases.
  double max_abs_entry() const;

  bool operator==(const ReluNet&) const = default;

 private:
  std::vector<int> widths_;
  std::vector<Mat> weights_;
  std::vector<Vec> biases_;
  std::optional<double> bound_;
};

/// Clamps every weight and bias entry to [-K, K] and records K as the bound.
void clip_weights(ReluNet& net, double k);

enum class DiscMode { orbit_average, input_average };

std::string to_string(DiscMode m);
DiscMode disc_mode_from_string(const std::string& s);

/// Sigma-invariant discriminator around a scalar-output base network.
/// orbit_average: (1/|Sigma|) sum_i base(sigma_i^{-1} x).
/// input_average: base(W_Sigma x) with W_Sigma the group-averaged matrix.
class InvariantDiscriminator {
 public:
  InvariantDiscriminator(ReluNet base, FiniteGroup group, DiscMode mode = DiscMode::orbit_average);

  double forward(const Vec& x) const;
  /// One output per column.
  Vec forward_batch(const Mat& x) const;
  /// Gradients of sum_j upstream_j * forward(x_j).
  NetGradients backward_batch(const Mat& x, const Vec& upstream) const;

  ReluNet& base() { return base_; }
  const ReluNet& base() const { return base_; }
  const FiniteGroup& group() const { return group_; }
  DiscMode mode() const { return mode_; }

 private:
  Mat expand(const Mat& x) const;

  ReluNet base_;
  FiniteGroup group_;
  DiscMode mode_;
  std::vector<Mat> inverse_mats_;
  Mat w_sigma_;
};

/// Generator R -> R^d followed by a random group element drawn from the
/// Haar (uniform) measure.
class InvariantGenerator {
 public:
  InvariantGenerator(ReluNet base, FiniteGroup group);

  Vec generate(double z, Rng& rng) const;
  /// Generates one column per latent; the drawn element indices are written
  /// to `sigmas` when non-null.
  Mat generate_batch(const Vec& z, Rng& rng, std::vector<std::size_t>* sigmas = nullptr) const;
  /// Applies fixed elements (no sampling).
  Mat generate_with(const Vec& z, const std::vector<std::size_t>& sigmas) const;

  ReluNet& base() { return base_; }
  const ReluNet& base() const { return base_; }
  const FiniteGroup& group() const { return group_; }

 private:
  ReluNet base_;
  FiniteGroup group_;
};

/// Continuous piecewise-linear map R -> R^d: constant x_0 before z_{1/2},
/// linear from x_{i-1} to x_i on [z_{i-1/2}, z_i), constant x_i on
/// [z_i, z_{i+1/2}), constant x_m from z_m on.
class TransportMap {
 public:
  TransportMap(std::vector<double> breakpoints, Cloud targets);

  Vec operator()(double z) const;
  Cloud evaluate(const Vec& z) const;

  /// z_{1/2}, z_1, z_{3/2}, ..., z_m (2m values).
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const Cloud& targets() const { return targets_; }
  /// Source mass assigned to each target's plateau and each segment, as
  /// computed at construction.
  const Vec& target_weights() const { return weights_; }

  /// One z per target inside the interval that maps exactly onto it.
  std::vector<double> plateau_midpoints() const;

 private:
  friend TransportMap build_transport_map(const Cloud&, const std::function<double(double)>&, double);
  std::vector<double> breakpoints_;
  Cloud targets_;
  Vec weights_;
};

/// Builds the map for the empirical measure on `points` (columns, duplicates
/// merged into heavier atoms). For consecutive distinct targets with gap g_i
/// and weights w_i the source masses are w_0 before z_{1/2}, eps/(m g_i) on
/// each segment and w_i - eps/(m g_i) on each plateau; breakpoints are
/// `quantile` of the cumulative masses. Needs 0 < eps < m w_i g_i.
TransportMap build_transport_map(const Cloud& points, const std::function<double(double)>& quantile, double eps);

/// Whether n atoms fit the width/depth budget: W >= 7d + 1, L >= 2 and
/// n <= (W - d - 1)/2 * floor((W - d - 1)/(6d)) * floor(L/2) + 2.
bool transport_capacity_check(long width, long depth, long n, long d);

struct CheckpointMeta {
  std::string mode;   // discriminator mode, or "generator"
  std::string group;  // group descriptor
};

/// First line: JSON header {format, version, widths, K, mode, group}. Then
/// one line per weight matrix (row-major) and one per bias vector, values in
/// shortest round-trip decimal form, so a reload is bit-exact.
void save_checkpoint(std::ostream& os, const ReluNet& net, const CheckpointMeta& meta);
ReluNet load_checkpoint(std::istream& is, CheckpointMeta* meta = nullptr);

}  // namespace invgan
