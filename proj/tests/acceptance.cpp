// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails. Optional arguments select criteria by number.

#include "invgan/covering.hpp"
#include "invgan/domain.hpp"
#include "invgan/experiments.hpp"
#include "invgan/ipm.hpp"
#include "invgan/measure.hpp"
#include "invgan/network.hpp"
#include "invgan/ot.hpp"
#include "invgan/report.hpp"
#include "invgan/rng.hpp"
#include "invgan/targets.hpp"
#include "invgan/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

using namespace invgan;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

int hardware_workers() { return std::max(1, static_cast<int>(std::thread::hardware_concurrency())); }

Cloud random_cloud(int d, Eigen::Index n, Rng& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Cloud c(d, n);
  for (Eigen::Index i = 0; i < c.size(); ++i) c(i) = u(rng);
  return c;
}

EmpiricalMeasure random_weighted(int d, Eigen::Index n, Rng& rng) {
  std::uniform_real_distribution<double> u(0.1, 1.0);
  Vec w(n);
  for (Eigen::Index i = 0; i < n; ++i) w(i) = u(rng);
  w /= w.sum();
  return EmpiricalMeasure(random_cloud(d, n, rng), w);
}

ScalarFn net_fn(const ReluNet& net) {
  return [net](const Vec& x) { return net.forward(x)(0); };
}

std::vector<FiniteGroup> groups_2d() {
  return {make_reflection_group(0, 2), make_cyclic_rotation_group(3, 2), make_cyclic_rotation_group(4, 2),
          make_cyclic_rotation_group(8, 2), group_from_descriptor("dihedral:4", 2)};
}

void randomize_biases(ReluNet& net, Rng& rng, double scale) {
  std::normal_distribution<double> nd;
  for (std::size_t l = 0; l < net.layers(); ++l)
    for (Eigen::Index i = 0; i < net.bias(l).size(); ++i) net.bias(l)(i) = scale * nd(rng);
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt2(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

// 1. Symmetrization operators are idempotent.
Outcome criterion1() {
  Rng rng(101);
  const auto groups = groups_2d();
  int instances = 0, failures = 0;
  double worst_fn = 0.0;
  for (int t = 0; t < 100; ++t) {
    const FiniteGroup& g = groups[static_cast<std::size_t>(t) % groups.size()];
    const auto mu = random_weighted(2, 1 + t % 15, rng);
    const auto once = symmetrize_measure(g, mu);
    if (!approx_equal(symmetrize_measure(g, once), once)) ++failures;

    ReluNet net = ReluNet::glorot({2, 8, 8, 1}, rng);
    randomize_biases(net, rng, 0.2);
    const ScalarFn s1 = symmetrize_function(g, net_fn(net));
    const ScalarFn s2 = symmetrize_function(g, s1);
    const Cloud pts = random_cloud(2, 50, rng);
    for (Eigen::Index j = 0; j < pts.cols(); ++j) worst_fn = std::max(worst_fn, std::abs(s1(pts.col(j)) - s2(pts.col(j))));
    ++instances;
  }
  return {failures == 0 && worst_fn <= 1e-12 && instances == 100,
          std::to_string(instances) + " instances, measure mismatches " + std::to_string(failures) +
              fmt(", worst function gap %.2e", worst_fn)};
}

// 2. Symmetrized IPM equality, including invariant measures.
Outcome criterion2() {
  Rng rng(202);
  const auto groups = groups_2d();
  double worst = 0.0, worst_inv = 0.0;
  int count = 0;
  for (int t = 0; t < 100; ++t) {
    const FiniteGroup& g = groups[static_cast<std::size_t>(t) % groups.size()];
    std::vector<ScalarFn> fam;
    for (int k = 0; k < 4; ++k) fam.push_back(net_fn(ReluNet::glorot({2, 6, 6, 1}, rng)));
    fam.push_back([](const Vec& x) { return x.norm(); });
    const auto nu = random_weighted(2, 3 + t % 10, rng);
    const auto mu = random_weighted(2, 3 + (t / 3) % 10, rng);
    const auto r = lemma1_check(g, fam, nu, mu);
    worst = std::max(worst, std::abs(r.lhs - r.rhs));
    ++count;
  }
  for (int t = 0; t < 20; ++t) {
    const FiniteGroup& g = groups[static_cast<std::size_t>(t) % groups.size()];
    std::vector<ScalarFn> fam;
    for (int k = 0; k < 3; ++k) fam.push_back(net_fn(ReluNet::glorot({2, 6, 1}, rng)));
    const auto nu = symmetrize_measure(g, random_weighted(2, 4, rng));
    const auto mu = symmetrize_measure(g, random_weighted(2, 4, rng));
    const auto r = lemma1_check(g, fam, nu, mu);
    worst_inv = std::max({worst_inv, std::abs(r.lhs - r.rhs), std::abs(r.lhs - r.direct)});
  }
  return {count == 100 && worst <= 1e-9 && worst_inv <= 1e-9,
          std::to_string(count) + fmt2(" instances, worst gap %.2e, invariant-measure gap %.2e", worst, worst_inv)};
}

// 3. Orbit-constant discriminators and an invariant generator law.
Outcome criterion3() {
  Rng rng(303);
  double worst = 0.0;
  for (const auto& g : groups_2d()) {
    for (DiscMode mode : {DiscMode::orbit_average, DiscMode::input_average}) {
      ReluNet base = ReluNet::glorot({2, 16, 16, 1}, rng);
      randomize_biases(base, rng, 0.2);
      InvariantDiscriminator d(base, g, mode);
      const Cloud x = random_cloud(2, 1000, rng);
      const Vec f = d.forward_batch(x);
      for (const auto& e : g.elements()) {
        const Vec fs = d.forward_batch(e.matrix * x);
        for (Eigen::Index j = 0; j < x.cols(); ++j)
          worst = std::max(worst, std::abs(fs(j) - f(j)) / std::max(1e-12, std::abs(f(j))));
      }
    }
  }

  const Target t = builtin_target("ring_mixture");
  TrainConfig c;
  c.n = 200;
  c.m = 400;
  c.group = "cyclic:4";
  c.gen_steps = 200;
  c.seed = 303;
  const auto trained = train_gan(c, t.sample, uniform_latent());
  Rng draw_rng(3031);
  const Eigen::Index n_draw = 3000;
  Vec z(n_draw);
  for (Eigen::Index j = 0; j < n_draw; ++j) z(j) = uniform_latent()(draw_rng);
  const Cloud s = trained.generator.generate_batch(z, draw_rng);
  const double floor = wasserstein1_exact(EmpiricalMeasure::uniform(s.leftCols(n_draw / 2)),
                                          EmpiricalMeasure::uniform(s.rightCols(n_draw / 2)));
  const auto a = EmpiricalMeasure::uniform(s);
  double worst_law = 0.0;
  for (const auto& e : trained.generator.group().elements()) {
    if (e.matrix.isIdentity(0.0)) continue;
    worst_law = std::max(worst_law, wasserstein1_exact(a, transform(e, a)));
  }
  return {worst <= 1e-6 && worst_law <= 2.0 * floor,
          fmt("worst relative orbit gap %.2e", worst) +
              fmt2(", generator W1(x, sigma x) max %.4f vs floor %.4f", worst_law, floor)};
}

// 4. Transport construction.
Outcome criterion4() {
  Rng rng(404);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const auto groups = groups_2d();
  auto quantile = [](double p) { return p; };
  int ok = 0;
  double worst_margin = -1e9;
  for (int c = 0; c < 20; ++c) {
    const Eigen::Index n = 2 + (c * 7) % 19;
    const FiniteGroup& g = groups[static_cast<std::size_t>(c) % groups.size()];
    const Cloud pts = random_cloud(2, n, rng);
    double gap = 1e300;
    for (Eigen::Index i = 1; i < n; ++i) gap = std::min(gap, (pts.col(i) - pts.col(i - 1)).norm());
    const double eps = 0.05 * gap;
    const TransportMap phi = build_transport_map(pts, quantile, eps);

    Vec z(100000);
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = unif(rng);
    const Cloud pushed = phi.evaluate(z);
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(z.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<Eigen::Index>(i);
    std::shuffle(idx.begin(), idx.end(), rng);
    Cloud sub(2, 4000);
    for (Eigen::Index j = 0; j < sub.cols(); ++j) sub.col(j) = pushed.col(idx[static_cast<std::size_t>(j)]);

    const Cloud orbit_pts = orbit_cloud(g, pts);
    double diam = 0.0;
    for (Eigen::Index i = 0; i < orbit_pts.cols(); ++i)
      for (Eigen::Index j = i + 1; j < orbit_pts.cols(); ++j)
        diam = std::max(diam, (orbit_pts.col(i) - orbit_pts.col(j)).norm());

    const double w = wasserstein1_symmetrized(g, merge_duplicates(EmpiricalMeasure::uniform(sub)),
                                              EmpiricalMeasure::uniform(pts));
    const double bound = eps + 0.02 * diam;
    worst_margin = std::max(worst_margin, w - bound);
    if (w <= bound) ++ok;
  }
  return {ok == 20, std::to_string(ok) + "/20 configurations" + fmt(", worst W1 - bound %.4f", worst_margin)};
}

// 5. Backprop against central finite differences.
Outcome criterion5() {
  Rng rng(505);
  std::normal_distribution<double> nd;
  auto fd = [](ReluNet net, const std::function<double(const ReluNet&)>& loss) {
    Vec p = net.parameters();
    Vec g(p.size());
    for (Eigen::Index k = 0; k < p.size(); ++k) {
      const double orig = p(k);
      p(k) = orig + 1e-5;
      net.set_parameters(p);
      const double up = loss(net);
      p(k) = orig - 1e-5;
      net.set_parameters(p);
      const double dn = loss(net);
      p(k) = orig;
      g(k) = (up - dn) / 2e-5;
    }
    return g;
  };
  auto rel = [](const Vec& a, const Vec& b) { return (a - b).norm() / std::max(1e-8, std::max(a.norm(), b.norm())); };
  const auto groups = groups_2d();
  double worst = 0.0;
  int nets = 0, disc_nets = 0;
  for (int t = 0; t < 20; ++t) {
    const int din = 1 + t % 3, dout = 1 + (t / 3) % 2;
    ReluNet net = ReluNet::glorot({din, 7, 6, dout}, rng);
    randomize_biases(net, rng, 0.2);
    Mat x(din, 5), up(dout, 5);
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = nd(rng);
    for (Eigen::Index i = 0; i < up.size(); ++i) up(i) = nd(rng);
    const auto loss = [&](const ReluNet& n) { return (up.array() * n.forward_batch(x).array()).sum(); };
    worst = std::max(worst, rel(fd(net, loss), net.backward_batch(x, up).flat()));
    ++nets;
  }
  for (int t = 0; t < 20; ++t) {
    const FiniteGroup& g = groups[static_cast<std::size_t>(t) % groups.size()];
    const DiscMode mode = t % 2 ? DiscMode::input_average : DiscMode::orbit_average;
    ReluNet base = ReluNet::glorot({2, 7, 7, 1}, rng);
    randomize_biases(base, rng, 0.3);
    InvariantDiscriminator d(base, g, mode);
    Mat x(2, 6);
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = nd(rng);
    Vec up(6);
    for (Eigen::Index i = 0; i < 6; ++i) up(i) = nd(rng);
    const auto loss = [&](const ReluNet& n) { return up.dot(InvariantDiscriminator(n, g, mode).forward_batch(x)); };
    worst = std::max(worst, rel(fd(base, loss), d.backward_batch(x, up).flat()));
    ++disc_nets;
  }
  return {worst <= 1e-4 && nets >= 20 && disc_nets >= 20,
          std::to_string(nets) + " plain nets, " + std::to_string(disc_nets) +
              " invariant discriminators" + fmt(", worst relative error %.2e", worst)};
}

// 6. Covering ratio.
Outcome criterion6() {
  bool ok = true;
  std::string detail;
  for (const char* name : {"disk_sector_4", "mirror_square"}) {
    const DomainSpec spec = builtin_domain(name);
    const double ratio = covering_ratio_check(spec, 0.05, 20000, 606);
    const double bound = 1.15 / static_cast<double>(spec.group.order());
    ok = ok && ratio <= bound;
    detail += std::string(detail.empty() ? "" : ", ") + name + fmt2(" ratio %.4f (bound %.4f)", ratio, bound);
  }
  return {ok, detail};
}

std::string csv_bytes(const CommandOutput& o) {
  std::ostringstream os;
  write_csv(os, o.results);
  return os.str();
}

const char* kDelta3Config =
    "target = ring_mixture\n"
    "groups = trivial, cyclic:2, cyclic:4, cyclic:8\n"
    "n_grid = 50, 100, 200, 400, 800, 1600\n"
    "trials = 10\n"
    "reference_size = 4000\n";

std::string delta3_first_run;

// 7. Delta3 scaling on the ring mixture (single worker).
Outcome criterion7() {
  const CommandOutput o = run_command("delta3-sweep", Config::parse_string(kDelta3Config), 7, 1);
  delta3_first_run = csv_bytes(o);
  bool ok = true;
  std::string detail = "slopes";
  for (const auto& f : o.summary["fits"]) {
    const double s = f["slope"].get<double>();
    ok = ok && s >= -0.65 && s <= -0.35;
    detail += " " + f["group"].get<std::string>() + fmt("=%.3f", s);
  }
  const double med = o.summary["collapse"]["median"].get<double>();
  ok = ok && med >= 0.6 && med <= 1.6;
  return {ok, detail + fmt(", collapse median %.3f", med)};
}

// 8. Intrinsic-dimension rates.
Outcome criterion8() {
  const CommandOutput o = run_command("lowdim", Config{}, 8, hardware_workers());
  bool ok = true;
  std::string detail;
  for (const auto& r : o.summary["replications"]) {
    const double c = r["circle"]["slope"].get<double>(), b = r["ball"]["slope"].get<double>();
    ok = ok && c >= -0.65 && c <= -0.35 && b >= -0.45 && b <= -0.22 && c < b;
    detail += std::string(detail.empty() ? "" : "; ") + fmt2("circle %.3f ball %.3f", c, b);
  }
  return {ok, detail};
}

// 9. GAN end to end.
Outcome criterion9() {
  const CommandOutput o = run_command("gan-sweep", Config::parse_string("n_grid = 500\nseeds = 5\n"), 9,
                                      hardware_workers());
  const double mi = o.summary["median_w1"]["invariant"].get<double>();
  const double mv = o.summary["median_w1"]["vanilla"].get<double>();
  bool floors_ok = true;
  int rows = 0;
  for (const auto& row : o.results.rows) {
    if (row[7] == "1") continue;
    ++rows;
    floors_ok = floors_ok && std::stod(row[5]) >= 0.5 * std::stod(row[6]);
  }
  const int excluded = o.summary["excluded"].get<int>();
  return {mi <= mv && floors_ok && rows == 10,
          fmt2("median W1 invariant %.4f vanilla %.4f", mi, mv) +
              fmt2(", floors invariant %.4f vanilla %.4f", o.summary["median_delta3_floor"]["invariant"].get<double>(),
                   o.summary["median_delta3_floor"]["vanilla"].get<double>()) +
              ", excluded " + std::to_string(excluded) + (floors_ok ? ", every run above half its floor" : ", floor violated")};
}

// 10. Byte-identical reruns.
Outcome criterion10() {
  const CommandOutput again = run_command("delta3-sweep", Config::parse_string(kDelta3Config), 7, hardware_workers());
  const bool delta3_same = !delta3_first_run.empty() && csv_bytes(again) == delta3_first_run;
  const Config gan = Config::parse_string(
      "n_grid = 100\nseeds = 2\nn_eval = 300\nreference_size = 500\ntrain.gen_steps = 30\ntrain.m = 200\n");
  const bool gan_same = csv_bytes(run_command("gan-sweep", gan, 10, 1)) ==
                        csv_bytes(run_command("gan-sweep", gan, 10, hardware_workers()));
  return {delta3_same && gan_same, std::string("delta3-sweep rerun ") + (delta3_same ? "identical" : "differs") +
                                       ", gan-sweep rerun " + (gan_same ? "identical" : "differs")};
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));
  struct Criterion {
    int id;
    const char* name;
    double limit_seconds;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "symmetrization idempotence", 5, criterion1},
      {2, "symmetrized IPM equality", 30, criterion2},
      {3, "invariant architectures", 60, criterion3},
      {4, "transport construction", 120, criterion4},
      {5, "gradient correctness", 30, criterion5},
      {6, "covering ratio", 60, criterion6},
      {7, "delta3 scaling", 600, criterion7},
      {8, "intrinsic-dimension rates", 600, criterion8},
      {9, "GAN end to end", 1800, criterion9},
      {10, "determinism", 600, criterion10},
  };
  int failed = 0, ran = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    ++ran;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs <= c.limit_seconds;
    const bool pass = out.passed && in_time;
    if (!pass) ++failed;
    std::printf("%s criterion %d (%s): %s [%.1f s of %.0f s%s]\n", pass ? "PASS" : "FAIL", c.id, c.name,
                out.detail.c_str(), secs, c.limit_seconds, in_time ? "" : ", over time");
    std::fflush(stdout);
  }
  std::printf("%d/%d criteria passed\n", ran - failed, ran);
  return failed == 0 ? 0 : 1;
}
