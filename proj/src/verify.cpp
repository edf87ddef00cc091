#include "invgan/covering.hpp"
#include "invgan/domain.hpp"
#include "invgan/experiments.hpp"
#include "invgan/ipm.hpp"
#include "invgan/measure.hpp"
#include "invgan/network.hpp"
#include "invgan/ot.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace invgan {

namespace {

using Checks = std::vector<CheckResult>;

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(4);
  s << v;
  return s.str();
}

void add(Checks& out, const std::string& suite, const std::string& check, bool ok, const std::string& detail = "") {
  out.push_back({suite, check, ok, detail});
}

Cloud uniform_cloud(int d, Eigen::Index n, Rng& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Cloud c(d, n);
  for (Eigen::Index i = 0; i < c.size(); ++i) c(i) = u(rng);
  return c;
}

ScalarFn net_fn(const ReluNet& net) {
  return [net](const Vec& x) { return net.forward(x)(0); };
}

std::vector<FiniteGroup> planar_groups() {
  return {group_from_descriptor("reflection:0", 2), group_from_descriptor("cyclic:4", 2),
          group_from_descriptor("cyclic:3", 2), group_from_descriptor("dihedral:4", 2)};
}

void suite_group(Checks& out, const VerifyConfig& cfg, Rng& rng) {
  for (const std::string desc : {"trivial", "cyclic:2", "cyclic:4", "cyclic:8", "reflection:0", "dihedral:4"}) {
    FiniteGroup g = group_from_descriptor(desc, 2);
    if (cfg.inject_fault == "cayley" && desc == "cyclic:4") g.corrupt_cayley_entry(1, 2, 0);
    const AxiomReport r = verify_group_axioms(g);
    add(out, "group", "axioms " + desc, r.ok(), r.ok() ? "" : r.violations.front());
  }
  const FiniteGroup c4 = group_from_descriptor("cyclic:4", 2);
  std::vector<int> counts(4, 0);
  for (int i = 0; i < 10000; ++i) counts[haar_sample_index(c4, rng)]++;
  double worst = 0.0;
  for (int c : counts) worst = std::max(worst, std::abs(c / 10000.0 - 0.25));
  add(out, "group", "haar frequencies C4", worst <= 0.02, "max deviation " + fmt(worst));
}

void suite_invariance(Checks& out, Rng& rng) {
  const Cloud x = uniform_cloud(2, 1000, rng);
  for (const auto& g : planar_groups()) {
    for (DiscMode mode : {DiscMode::orbit_average, DiscMode::input_average}) {
      InvariantDiscriminator d(ReluNet::glorot({2, 16, 16, 1}, rng), g, mode);
      const Vec f = d.forward_batch(x);
      double worst = 0.0;
      for (const auto& e : g.elements()) {
        const Vec fs = d.forward_batch(e.matrix * x);
        for (Eigen::Index j = 0; j < x.cols(); ++j)
          worst = std::max(worst, std::abs(fs(j) - f(j)) / (1.0 + std::abs(f(j))));
      }
      add(out, "invariance", "discriminator " + to_string(mode) + " " + g.descriptor(), worst <= 1e-6,
          "max relative deviation " + fmt(worst));
    }
  }
  // Constant generator under C4 spreads evenly over the orbit.
  ReluNet c({1, 1, 2});
  c.bias(1)(0) = 1.0;
  InvariantGenerator gen(c, group_from_descriptor("cyclic:4", 2));
  std::vector<int> counts(4, 0);
  for (int i = 0; i < 10000; ++i) {
    const Vec p = gen.generate(0.0, rng);
    counts[p(0) > 0.5 ? 0 : p(1) > 0.5 ? 1 : p(0) < -0.5 ? 2 : 3]++;
  }
  double worst = 0.0;
  for (int k : counts) worst = std::max(worst, std::abs(k / 10000.0 - 0.25));
  add(out, "invariance", "generator orbit frequencies C4", worst <= 0.02, "max deviation " + fmt(worst));
}

void suite_idempotence(Checks& out, Rng& rng) {
  int bad_measure = 0, bad_fn = 0;
  double worst_dual = 0.0;
  int count = 0;
  const Cloud grid = uniform_cloud(2, 50, rng);
  for (const auto& g : planar_groups()) {
    for (int t = 0; t < 25; ++t, ++count) {
      std::uniform_real_distribution<double> u(0.1, 1.0);
      const Eigen::Index n = 1 + t % 10;
      Vec w(n);
      for (Eigen::Index i = 0; i < n; ++i) w(i) = u(rng);
      w /= w.sum();
      const EmpiricalMeasure mu(uniform_cloud(2, n, rng), w);
      const auto once = symmetrize_measure(g, mu);
      if (!approx_equal(symmetrize_measure(g, once), once)) ++bad_measure;
      const ScalarFn f = net_fn(ReluNet::glorot({2, 8, 1}, rng));
      const ScalarFn s1 = symmetrize_function(g, f), s2 = symmetrize_function(g, s1);
      for (Eigen::Index j = 0; j < grid.cols(); ++j)
        if (std::abs(s1(grid.col(j)) - s2(grid.col(j))) > 1e-12) {
          ++bad_fn;
          break;
        }
      worst_dual = std::max(worst_dual, std::abs(once.expect(f) - mu.expect(s1)));
    }
  }
  add(out, "idempotence", "measures S^S[S^S mu] = S^S mu", bad_measure == 0,
      std::to_string(bad_measure) + " of " + std::to_string(count) + " differ");
  add(out, "idempotence", "functions S_S[S_S f] = S_S f", bad_fn == 0,
      std::to_string(bad_fn) + " of " + std::to_string(count) + " differ");
  add(out, "idempotence", "duality identity", worst_dual <= 1e-12, "max error " + fmt(worst_dual));
}

void suite_lemma1(Checks& out, Rng& rng) {
  double worst = 0.0, worst_inv = 0.0;
  for (const std::string desc : {"reflection:0", "cyclic:4"}) {
    const FiniteGroup g = group_from_descriptor(desc, 2);
    for (int t = 0; t < 50; ++t) {
      std::vector<ScalarFn> fam;
      for (int k = 0; k < 4; ++k) fam.push_back(net_fn(ReluNet::glorot({2, 6, 6, 1}, rng)));
      const auto nu = EmpiricalMeasure::uniform(uniform_cloud(2, 10, rng));
      const auto mu = EmpiricalMeasure::uniform(uniform_cloud(2, 10, rng));
      const auto r = lemma1_check(g, fam, nu, mu);
      worst = std::max(worst, std::abs(r.lhs - r.rhs));
      const auto snu = symmetrize_measure(g, nu), smu = symmetrize_measure(g, mu);
      const auto ri = lemma1_check(g, fam, snu, smu);
      worst_inv = std::max({worst_inv, std::abs(ri.lhs - ri.rhs), std::abs(ri.lhs - ri.direct)});
    }
  }
  add(out, "lemma1", "symmetrized IPM equals invariant-class IPM (100 instances)", worst <= 1e-9,
      "max gap " + fmt(worst));
  add(out, "lemma1", "invariant measures clause", worst_inv <= 1e-9, "max gap " + fmt(worst_inv));
}

void suite_transport(Checks& out, Rng& rng) {
  auto ident = [](double p) { return p; };
  int plateau_misses = 0;
  double worst_excess = -1e9;
  for (int t = 0; t < 20; ++t) {
    const Eigen::Index n = 2 + t % 10;
    const Cloud pts = uniform_cloud(2, n, rng);
    double gap = 1e9;
    for (Eigen::Index i = 1; i < n; ++i) gap = std::min(gap, (pts.col(i) - pts.col(i - 1)).norm());
    const double eps = 0.05 * gap;
    const TransportMap m = build_transport_map(pts, ident, eps);
    const auto mids = m.plateau_midpoints();
    for (Eigen::Index i = 0; i < n; ++i)
      if (m(mids[static_cast<std::size_t>(i)]) != pts.col(i)) ++plateau_misses;
    if (t < 5) {
      std::uniform_real_distribution<double> u(0.0, 1.0);
      Vec z(4000);
      for (Eigen::Index j = 0; j < z.size(); ++j) z(j) = u(rng);
      const auto push = merge_duplicates(EmpiricalMeasure::uniform(m.evaluate(z)));
      double diam = 0.0;
      for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index b = a + 1; b < n; ++b) diam = std::max(diam, (pts.col(a) - pts.col(b)).norm());
      const double w = wasserstein1_exact(push, EmpiricalMeasure::uniform(pts));
      worst_excess = std::max(worst_excess, w - (eps + 0.02 * diam));
    }
  }
  add(out, "transport", "plateau midpoints hit every target", plateau_misses == 0,
      std::to_string(plateau_misses) + " misses");
  add(out, "transport", "pushforward within eps + 0.02 diam", worst_excess <= 0.0,
      "worst excess " + fmt(worst_excess));
  add(out, "transport", "capacity formula d=2 W=29 L=10 threshold 132",
      transport_capacity_check(29, 10, 132, 2) && !transport_capacity_check(29, 10, 133, 2));
}

void suite_gradients(Checks& out, Rng& rng) {
  std::normal_distribution<double> nd;
  double worst = 0.0;
  int nets = 0;
  for (int t = 0; t < 24; ++t, ++nets) {
    const bool wrapped = t % 2 == 1;
    ReluNet base = ReluNet::glorot({2, 6, 5, 1}, rng);
    for (std::size_t l = 0; l < base.layers(); ++l)
      for (Eigen::Index i = 0; i < base.bias(l).size(); ++i) base.bias(l)(i) = 0.2 * nd(rng);
    const FiniteGroup g = group_from_descriptor(wrapped ? "cyclic:4" : "trivial", 2);
    Mat x(2, 5);
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = nd(rng);
    Vec up(5);
    for (Eigen::Index i = 0; i < 5; ++i) up(i) = nd(rng);
    auto loss = [&](const ReluNet& n) { return up.dot(InvariantDiscriminator(n, g).forward_batch(x)); };
    const Vec bp = InvariantDiscriminator(base, g).backward_batch(x, up).flat();
    Vec p = base.parameters(), fd(p.size());
    for (Eigen::Index k = 0; k < p.size(); ++k) {
      ReluNet a = base, b = base;
      Vec pp = p, pm = p;
      pp(k) += 1e-5;
      pm(k) -= 1e-5;
      a.set_parameters(pp);
      b.set_parameters(pm);
      fd(k) = (loss(a) - loss(b)) / 2e-5;
    }
    worst = std::max(worst, (fd - bp).norm() / std::max(1e-8, std::max(fd.norm(), bp.norm())));
  }
  add(out, "gradients", "finite differences on " + std::to_string(nets) + " nets", worst <= 1e-4,
      "max relative error " + fmt(worst));
}

void suite_covering(Checks& out, const VerifyConfig& cfg) {
  for (const std::string name : {"disk_sector_4", "mirror_square"}) {
    const DomainSpec spec = builtin_domain(name);
    const double ratio = covering_ratio_check(spec, 0.05, 20000, cfg.seed);
    const double bound = 1.15 / static_cast<double>(spec.group.order());
    add(out, "covering", "ratio " + name, ratio <= bound, "ratio " + fmt(ratio) + " bound " + fmt(bound));
    Rng rng(cfg.seed);
    const Cloud c = sample_X0_cloud(spec, 500, rng);
    int bad = 0;
    for (Eigen::Index j = 0; j < c.cols(); ++j)
      for (const auto& e : spec.group.elements())
        if ((project_T0(spec, e.matrix * c.col(j)).x0 - c.col(j)).norm() > 1e-9) ++bad;
    add(out, "covering", "T0 orbit-constant " + name, bad == 0, std::to_string(bad) + " mismatches");
  }
}

}  // namespace

const std::vector<std::string>& verify_suite_names() {
  static const std::vector<std::string> names{"group",     "invariance", "idempotence", "lemma1",
                                              "transport", "gradients",  "covering"};
  return names;
}

std::vector<CheckResult> run_verify(const VerifyConfig& cfg) {
  const auto& all = verify_suite_names();
  for (const auto& s : cfg.suites)
    if (std::find(all.begin(), all.end(), s) == all.end()) throw ConfigError("unknown verify suite '" + s + "'");
  if (cfg.inject_fault != "none" && cfg.inject_fault != "cayley")
    throw ConfigError("unknown fault '" + cfg.inject_fault + "'");
  Checks out;
  for (std::size_t i = 0; i < all.size(); ++i) {
    const std::string& s = all[i];
    if (!cfg.suites.empty() && std::find(cfg.suites.begin(), cfg.suites.end(), s) == cfg.suites.end()) continue;
    Rng rng(mix_seed(cfg.seed, {i}));
    if (s == "group") suite_group(out, cfg, rng);
    else if (s == "invariance") suite_invariance(out, rng);
    else if (s == "idempotence") suite_idempotence(out, rng);
    else if (s == "lemma1") suite_lemma1(out, rng);
    else if (s == "transport") suite_transport(out, rng);
    else if (s == "gradients") suite_gradients(out, rng);
    else suite_covering(out, cfg);
  }
  return out;
}

VerifyConfig verify_config_from(const Config& c) {
  VerifyConfig v;
  v.suites = c.get_string_list("suites", {});
  if (v.suites.size() == 1 && v.suites[0] == "all") v.suites.clear();
  v.inject_fault = c.get_string("inject_fault", v.inject_fault);
  v.seed = static_cast<std::uint64_t>(c.get_int("seed", 0));
  c.get_int("workers", 1);
  return v;
}

}  // namespace invgan
