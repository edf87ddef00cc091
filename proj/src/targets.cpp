#include "invgan/targets.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace invgan {

namespace {

// Rejection loop; every builtin accepts with probability well above 1/2.
template <class Draw, class Accept>
Vec rejection(Rng& rng, Draw draw, Accept accept) {
  for (;;) {
    Vec x = draw(rng);
    if (accept(x)) return x;
  }
}

}  // namespace

Target builtin_target(const std::string& name, const TargetParams& p) {
  const double pi = std::numbers::pi;
  Target t;
  t.name = name;
  if (name == "ring_mixture") {
    if (p.modes < 1) throw std::invalid_argument("ring_mixture needs at least one mode");
    if (!(p.sd > 0.0) || !(p.radius >= 0.0) || p.radius >= 1.0)
      throw std::invalid_argument("ring_mixture needs sd > 0 and 0 <= radius < 1");
    t.dim = 2;
    t.intrinsic_dim = 2;
    t.invariance = "cyclic:" + std::to_string(p.modes);
    t.diameter = 2.0;
    t.sample = [p, pi](Rng& rng) {
      std::uniform_int_distribution<int> pick(0, p.modes - 1);
      std::normal_distribution<double> nd(0.0, p.sd);
      const int j = pick(rng);
      const double a = 2.0 * pi * j / p.modes;
      const Vec c{{p.radius * std::cos(a), p.radius * std::sin(a)}};
      return rejection(
          rng, [&](Rng& r) { return Vec(c + Vec{{nd(r), nd(r)}}); }, [](const Vec& x) { return x.norm() <= 1.0; });
    };
  } else if (name == "mirror_gaussians") {
    if (!(p.sd > 0.0)) throw std::invalid_argument("mirror_gaussians needs sd > 0");
    t.dim = 2;
    t.intrinsic_dim = 2;
    t.invariance = "reflection:0";
    t.diameter = std::sqrt(5.0);
    t.sample = [p](Rng& rng) {
      std::bernoulli_distribution side(0.5);
      std::normal_distribution<double> nd(0.0, p.sd);
      const double cx = side(rng) ? 0.5 : -0.5;
      return rejection(
          rng, [&](Rng& r) { return Vec{{cx + nd(r), 0.5 + nd(r)}}; },
          [](const Vec& x) { return std::abs(x(0)) <= 1.0 && x(1) >= 0.0 && x(1) <= 1.0; });
    };
  } else if (name == "circle_R3") {
    t.dim = 3;
    t.intrinsic_dim = 1;
    t.invariance = "trivial";
    t.diameter = 2.0;
    t.sample = [pi](Rng& rng) {
      std::uniform_real_distribution<double> u(0.0, 2.0 * pi);
      const double a = u(rng);
      return Vec{{std::cos(a), std::sin(a), 0.0}};
    };
  } else if (name == "ball_R3") {
    t.dim = 3;
    t.intrinsic_dim = 3;
    t.invariance = "trivial";
    t.diameter = 2.0;
    t.sample = [](Rng& rng) {
      std::uniform_real_distribution<double> u(-1.0, 1.0);
      return rejection(
          rng, [&](Rng& r) { return Vec{{u(r), u(r), u(r)}}; }, [](const Vec& x) { return x.norm() <= 1.0; });
    };
  } else {
    throw std::invalid_argument("unknown target '" + name + "'");
  }
  return t;
}

Cloud sample_cloud(const Target& t, Eigen::Index n, Rng& rng) {
  Cloud c(t.dim, n);
  for (Eigen::Index j = 0; j < n; ++j) c.col(j) = t.sample(rng);
  return c;
}

}  // namespace invgan
