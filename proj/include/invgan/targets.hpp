#pragma once

// Synthetic group-invariant target distributions.

#include "invgan/rng.hpp"
#include "invgan/types.hpp"

#include <functional>
#include <string>

namespace invgan {

struct TargetParams {
  int modes = 8;        // ring_mixture: number of Gaussian components
  double radius = 0.6;  // ring_mixture: distance of the component means from 0
  double sd = 0.1;      // ring_mixture / mirror_gaussians: component spread
};

struct Target {
  std::string name;
  int dim = 0;
  int intrinsic_dim = 0;
  /// Largest group (descriptor) the law is exactly invariant under.
  std::string invariance;
  double diameter = 0.0;  // of the support
  std::function<Vec(Rng&)> sample;
};

/// ring_mixture: `modes` isotropic Gaussians with means on the circle of the
///   given radius at angles 2*pi*j/modes, each truncated to the unit disk.
/// mirror_gaussians: Gaussians at (+-0.5, 0.5) truncated to [-1,1] x [0,1].
/// circle_R3: uniform on the unit circle in the x-y plane of R^3.
/// ball_R3: uniform on the unit ball of R^3.
Target builtin_target(const std::string& name, const TargetParams& params = {});

Cloud sample_cloud(const Target& t, Eigen::Index n, Rng& rng);

}  // namespace invgan
