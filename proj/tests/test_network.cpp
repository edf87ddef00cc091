#include "doctest.h"

#include "invgan/measure.hpp"
#include "invgan/network.hpp"
#include "invgan/ot.hpp"

#include <cmath>
#include <random>
#include <sstream>

using namespace invgan;

namespace {

// Independent evaluation path: explicit loops, no Eigen products.
Vec straight_line_forward(const ReluNet& net, const Vec& x) {
  std::vector<double> h(x.data(), x.data() + x.size());
  for (std::size_t l = 0; l < net.layers(); ++l) {
    const Mat& w = net.weight(l);
    std::vector<double> next(static_cast<std::size_t>(w.rows()));
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      double s = net.bias(l)(r);
      for (Eigen::Index c = 0; c < w.cols(); ++c) s += w(r, c) * h[static_cast<std::size_t>(c)];
      next[static_cast<std::size_t>(r)] = (l + 1 < net.layers() && s < 0.0) ? 0.0 : s;
    }
    h = next;
  }
  return Eigen::Map<Vec>(h.data(), static_cast<Eigen::Index>(h.size()));
}

double rel_err(const Vec& a, const Vec& b) { return (a - b).norm() / std::max(1e-8, std::max(a.norm(), b.norm())); }

template <class Loss>
Vec fd_gradient(ReluNet net, Loss loss, double h = 1e-5) {
  Vec p = net.parameters();
  Vec g(p.size());
  for (Eigen::Index k = 0; k < p.size(); ++k) {
    const double orig = p(k);
    p(k) = orig + h;
    net.set_parameters(p);
    const double up = loss(net);
    p(k) = orig - h;
    net.set_parameters(p);
    const double dn = loss(net);
    p(k) = orig;
    g(k) = (up - dn) / (2 * h);
  }
  return g;
}

ReluNet relu_identity_net() {
  ReluNet net({1, 1, 1});
  net.weight(0)(0, 0) = 1.0;
  net.weight(1)(0, 0) = 1.0;
  return net;
}

}  // namespace

TEST_CASE("forward on trivial nets") {
  ReluNet zero({3, 5, 2});
  CHECK(zero.forward(Vec::Ones(3)).isZero(0.0));
  ReluNet r = relu_identity_net();
  CHECK(r.forward(Vec::Constant(1, -2.0))(0) == 0.0);
  CHECK(r.forward(Vec::Constant(1, 3.0))(0) == 3.0);
  CHECK_THROWS_AS(r.forward(Vec::Zero(2)), std::invalid_argument);
  CHECK_THROWS_AS(ReluNet({2}), std::invalid_argument);
}

TEST_CASE("forward matches straight-line oracle") {
  Rng rng(11);
  std::normal_distribution<double> nd;
  for (int t = 0; t < 50; ++t) {
    ReluNet net = ReluNet::glorot({3, 7, 5, 2}, rng);
    for (std::size_t l = 0; l < net.layers(); ++l)
      for (Eigen::Index i = 0; i < net.bias(l).size(); ++i) net.bias(l)(i) = 0.3 * nd(rng);
    Vec x(3);
    for (int i = 0; i < 3; ++i) x(i) = nd(rng);
    CHECK((net.forward(x) - straight_line_forward(net, x)).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("backward hand cases") {
  ReluNet aff({1, 1});
  aff.weight(0)(0, 0) = 2.5;
  aff.bias(0)(0) = -1.0;
  NetGradients g = aff.backward(Vec::Constant(1, 0.7), Vec::Constant(1, 1.0));
  CHECK(g.dW[0](0, 0) == doctest::Approx(0.7));
  CHECK(g.db[0](0) == doctest::Approx(1.0));
  CHECK(g.dx(0, 0) == doctest::Approx(2.5));

  Rng rng(3);
  ReluNet net = ReluNet::glorot({2, 4, 1}, rng);
  NetGradients z = net.backward(Vec::Ones(2), Vec::Zero(1));
  CHECK(z.flat().isZero(0.0));
  CHECK_THROWS_AS(net.backward(Vec::Ones(2), Vec::Zero(2)), std::invalid_argument);
}

TEST_CASE("backprop matches central finite differences") {
  Rng rng(2024);
  std::normal_distribution<double> nd;
  int checked = 0;
  for (int t = 0; t < 25; ++t) {
    const int din = 1 + t % 3, dout = 1 + (t / 3) % 2;
    ReluNet net = ReluNet::glorot({din, 6, 5, dout}, rng);
    for (std::size_t l = 0; l < net.layers(); ++l)
      for (Eigen::Index i = 0; i < net.bias(l).size(); ++i) net.bias(l)(i) = 0.2 * nd(rng);
    Mat x(din, 4);
    Mat up(dout, 4);
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = nd(rng);
    for (Eigen::Index i = 0; i < up.size(); ++i) up(i) = nd(rng);
    auto loss = [&](const ReluNet& n) { return (up.array() * n.forward_batch(x).array()).sum(); };
    const Vec fd = fd_gradient(net, loss);
    const Vec bp = net.backward_batch(x, up).flat();
    CHECK(rel_err(fd, bp) <= 1e-4);
    ++checked;
  }
  CHECK(checked >= 20);
}

TEST_CASE("clip_weights") {
  ReluNet net({1, 2, 1});
  net.weight(0)(0, 0) = 3.7;
  net.weight(0)(1, 0) = -0.2;
  net.bias(1)(0) = -9.0;
  clip_weights(net, 1.0);
  CHECK(net.weight(0)(0, 0) == 1.0);
  CHECK(net.weight(0)(1, 0) == -0.2);
  CHECK(net.bias(1)(0) == -1.0);
  CHECK(net.max_abs_entry() <= 1.0);
  const ReluNet once = net;
  clip_weights(net, 1.0);
  CHECK(net == once);
  CHECK_THROWS_AS(clip_weights(net, 0.0), std::invalid_argument);

  Rng rng(5);
  ReluNet g = ReluNet::glorot({10, 10, 1}, rng, 0.05);
  CHECK(g.max_abs_entry() <= 0.05);
}

TEST_CASE("invariant discriminator values") {
  Rng rng(8);
  ReluNet base = ReluNet::glorot({2, 8, 8, 1}, rng);
  InvariantDiscriminator triv(base, make_trivial_group(2));
  Vec x(2);
  x << 0.3, -0.8;
  CHECK(triv.forward(x) == base.forward(x)(0));

  // phi(x, y) = relu(x) under the mirror.
  ReluNet phi({2, 1, 1});
  phi.weight(0)(0, 0) = 1.0;
  phi.weight(1)(0, 0) = 1.0;
  InvariantDiscriminator mir(phi, make_reflection_group(0, 2));
  for (double v : {-1.5, -0.2, 0.0, 0.4, 2.0}) {
    Vec p(2);
    p << v, 0.9;
    CHECK(mir.forward(p) == doctest::Approx(std::abs(v) / 2).epsilon(1e-15));
  }
  CHECK_THROWS_AS(mir.forward(Vec::Zero(3)), std::invalid_argument);
  CHECK(disc_mode_from_string("input_average") == DiscMode::input_average);
  CHECK_THROWS_AS(disc_mode_from_string("x"), std::invalid_argument);
}

TEST_CASE("discriminators are orbit-constant") {
  Rng rng(21);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (const FiniteGroup& g : {make_cyclic_rotation_group(4, 2), make_reflection_group(0, 2),
                               make_cyclic_rotation_group(8, 2)}) {
    for (DiscMode mode : {DiscMode::orbit_average, DiscMode::input_average}) {
      InvariantDiscriminator d(ReluNet::glorot({2, 10, 10, 1}, rng), g, mode);
      Mat x(2, 1000);
      for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = u(rng);
      const Vec f = d.forward_batch(x);
      double worst = 0.0;
      for (const auto& e : g.elements()) {
        const Vec fs = d.forward_batch(e.matrix * x);
        for (Eigen::Index j = 0; j < x.cols(); ++j)
          worst = std::max(worst, std::abs(fs(j) - f(j)) / (1.0 + std::abs(f(j))));
      }
      CHECK(worst <= 1e-6);
    }
  }
}

TEST_CASE("orbit-average gradient equals orbit mean of base gradients") {
  Rng rng(31);
  std::normal_distribution<double> nd;
  const FiniteGroup g = make_cyclic_rotation_group(4, 2);
  ReluNet base = ReluNet::glorot({2, 6, 6, 1}, rng);
  InvariantDiscriminator d(base, g);
  Mat x(2, 5);
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = nd(rng);
  Vec up(5);
  for (Eigen::Index i = 0; i < 5; ++i) up(i) = nd(rng);
  NetGradients ours = d.backward_batch(x, up);
  NetGradients ref = base.backward_batch(g.element(g.inverse(0)).matrix * x, up.transpose());
  Mat dx = g.element(g.inverse(0)).matrix.transpose() * ref.dx;
  for (std::size_t i = 1; i < g.order(); ++i) {
    const Mat& m = g.element(g.inverse(i)).matrix;
    NetGradients gi = base.backward_batch(m * x, up.transpose());
    ref.add(gi);
    dx += m.transpose() * gi.dx;
  }
  ref.scale(1.0 / g.order());
  dx /= g.order();
  CHECK((ours.flat() - ref.flat()).cwiseAbs().maxCoeff() <= 1e-9);
  CHECK((ours.dx - dx).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("discriminator gradients match finite differences") {
  Rng rng(41);
  std::normal_distribution<double> nd;
  for (DiscMode mode : {DiscMode::orbit_average, DiscMode::input_average}) {
    for (int t = 0; t < 10; ++t) {
      const FiniteGroup g = (t % 2) ? make_cyclic_rotation_group(3, 2) : make_reflection_group(1, 2);
      ReluNet base = ReluNet::glorot({2, 7, 7, 1}, rng);
      // Nonzero biases keep W_Sigma x = 0 (C3) away from the ReLU kink.
      for (std::size_t l = 0; l < base.layers(); ++l)
        for (Eigen::Index i = 0; i < base.bias(l).size(); ++i) base.bias(l)(i) = 0.3 * nd(rng);
      InvariantDiscriminator d(base, g, mode);
      Mat x(2, 6);
      for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = nd(rng);
      Vec up(6);
      for (Eigen::Index i = 0; i < 6; ++i) up(i) = nd(rng);
      auto loss = [&](const ReluNet& n) { return up.dot(InvariantDiscriminator(n, g, mode).forward_batch(x)); };
      CHECK(rel_err(fd_gradient(d.base(), loss), d.backward_batch(x, up).flat()) <= 1e-4);

      // Input gradient.
      const NetGradients gr = d.backward_batch(x, up);
      Mat fdx(2, 6);
      for (Eigen::Index i = 0; i < x.size(); ++i) {
        Mat xp = x, xm = x;
        xp(i) += 1e-5;
        xm(i) -= 1e-5;
        fdx(i) = (up.dot(d.forward_batch(xp)) - up.dot(d.forward_batch(xm))) / 2e-5;
      }
      CHECK((fdx - gr.dx).norm() <= 1e-4 * std::max(1.0, fdx.norm()));
    }
  }
}

TEST_CASE("invariant generator") {
  Rng rng(1);
  ReluNet base = ReluNet::glorot({1, 5, 2}, rng);
  InvariantGenerator triv(base, make_trivial_group(2));
  Rng a(9);
  CHECK(triv.generate(0.3, a) == base.forward(Vec::Constant(1, 0.3)));

  // Constant base (1, 0) under C4.
  ReluNet c({1, 1, 2});
  c.bias(1)(0) = 1.0;
  const FiniteGroup g4 = make_cyclic_rotation_group(4, 2);
  InvariantGenerator gen(c, g4);
  Rng r(77);
  std::array<int, 4> counts{};
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    const Vec p = gen.generate(0.0, r);
    const int q = p(0) > 0.5 ? 0 : p(1) > 0.5 ? 1 : p(0) < -0.5 ? 2 : 3;
    counts[static_cast<std::size_t>(q)]++;
  }
  for (int k : counts) CHECK(std::abs(k / double(draws) - 0.25) <= 0.02);

  Rng s1(5), s2(5);
  const Vec z = Vec::LinSpaced(20, -1, 1);
  CHECK(gen.generate_batch(z, s1) == gen.generate_batch(z, s2));
  std::vector<std::size_t> sig;
  Rng s3(5);
  const Mat out = gen.generate_batch(z, s3, &sig);
  CHECK(out == gen.generate_with(z, sig));
}

TEST_CASE("transport map recipe") {
  auto ident = [](double p) { return p; };
  Cloud one(2, 1);
  one << 0.4, -0.2;
  TransportMap c = build_transport_map(one, ident, 0.1);
  CHECK(c.breakpoints().empty());
  CHECK(c(-5.0) == one.col(0));
  CHECK(c(5.0) == one.col(0));

  Cloud two(2, 2);
  two << 0, 1, 0, 0;
  TransportMap t = build_transport_map(two, ident, 0.1);
  REQUIRE(t.breakpoints().size() == 2);
  CHECK(t.breakpoints()[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(t.breakpoints()[1] == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(t(0.2) == two.col(0));
  CHECK(t(0.55)(0) == doctest::Approx(0.5));
  CHECK(t(0.9) == two.col(1));

  CHECK_THROWS_AS(build_transport_map(two, ident, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(build_transport_map(two, ident, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(build_transport_map(two, [](double p) { return 1.0 - p; }, 0.1), std::invalid_argument);

  // Duplicates merge into a heavier atom.
  Cloud dup(2, 3);
  dup << 0, 1, 0, 0, 0, 0;
  TransportMap d = build_transport_map(dup, ident, 0.1);
  CHECK(d.targets().cols() == 2);
  CHECK(d.target_weights()(0) == doctest::Approx(2.0 / 3));
  CHECK(d.breakpoints()[0] == doctest::Approx(2.0 / 3));
}

TEST_CASE("transport map pushforward is within epsilon in W1") {
  auto ident = [](double p) { return p; };
  Cloud two(2, 2);
  two << 0, 1, 0, 0;
  TransportMap t = build_transport_map(two, ident, 0.1);
  Rng rng(123);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Vec z(4000);
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = u(rng);
  const EmpiricalMeasure push = merge_duplicates(EmpiricalMeasure::uniform(t.evaluate(z)));
  const double w = wasserstein1_exact(push, EmpiricalMeasure::uniform(two));
  CHECK(w <= 0.1 + 0.02);
}

TEST_CASE("plateau midpoints hit every target") {
  Rng rng(55);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int t = 0; t < 20; ++t) {
    const Eigen::Index n = 2 + t % 10;
    Cloud pts(2, n);
    for (Eigen::Index i = 0; i < pts.size(); ++i) pts(i) = u(rng);
    double gap = 1e9;
    for (Eigen::Index i = 1; i < n; ++i) gap = std::min(gap, (pts.col(i) - pts.col(i - 1)).norm());
    const double eps = 0.05 * gap;
    TransportMap m = build_transport_map(pts, [](double p) { return p; }, eps);
    const auto mids = m.plateau_midpoints();
    REQUIRE(mids.size() == static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) CHECK(m(mids[static_cast<std::size_t>(i)]) == pts.col(i));
  }
}

TEST_CASE("transport capacity check") {
  for (long d = 1; d <= 4; ++d) CHECK(transport_capacity_check(7 * d + 1, 2, 2, d));
  // d=2, W=29, L=10: (26/2) * floor(26/12) * 5 + 2 = 13 * 2 * 5 + 2 = 132.
  CHECK(transport_capacity_check(29, 10, 132, 2));
  CHECK_FALSE(transport_capacity_check(29, 10, 133, 2));
  CHECK_FALSE(transport_capacity_check(14, 10, 1, 2));
  CHECK_FALSE(transport_capacity_check(15, 1, 1, 2));
}

TEST_CASE("checkpoint round trip is bit-exact") {
  Rng rng(99);
  std::normal_distribution<double> nd;
  ReluNet net = ReluNet::glorot({3, 9, 4, 1}, rng, 0.7);
  for (std::size_t l = 0; l < net.layers(); ++l)
    for (Eigen::Index i = 0; i < net.bias(l).size(); ++i) net.bias(l)(i) = nd(rng) * 1e-7;
  std::stringstream ss;
  save_checkpoint(ss, net, {"orbit_average", "cyclic:4"});
  CheckpointMeta meta;
  const ReluNet back = load_checkpoint(ss, &meta);
  CHECK(back == net);
  CHECK(meta.mode == "orbit_average");
  CHECK(meta.group == "cyclic:4");

  std::stringstream bad("{\"format\":\"other\"}\n");
  CHECK_THROWS_AS(load_checkpoint(bad), std::invalid_argument);
}
