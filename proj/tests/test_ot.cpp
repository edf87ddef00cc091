#include "doctest.h"

#include "invgan/kernels.hpp"
#include "invgan/ot.hpp"

#include <algorithm>
#include <numeric>

using namespace invgan;

namespace {

Cloud random_cloud(int d, Eigen::Index n, Rng& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Cloud c(d, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (int k = 0; k < d; ++k) c(k, j) = u(rng);
  return c;
}

// Oracle: minimum over all permutations.
double brute_force_assignment(const Mat& c) {
  std::vector<int> perm(static_cast<std::size_t>(c.rows()));
  std::iota(perm.begin(), perm.end(), 0);
  double best = 1e300;
  do {
    double s = 0;
    for (std::size_t i = 0; i < perm.size(); ++i) s += c(static_cast<Eigen::Index>(i), perm[i]);
    best = std::min(best, s);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// Oracle: integer supplies expanded into unit nodes, solved as an assignment.
double expanded_assignment(const Mat& c, const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b) {
  std::vector<Eigen::Index> rows, cols;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::int64_t k = 0; k < a[i]; ++k) rows.push_back(static_cast<Eigen::Index>(i));
  for (std::size_t j = 0; j < b.size(); ++j)
    for (std::int64_t k = 0; k < b[j]; ++k) cols.push_back(static_cast<Eigen::Index>(j));
  Mat big(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j)
      big(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = c(rows[i], cols[j]);
  return solve_assignment(big).cost;
}

EmpiricalMeasure line_measure(std::initializer_list<double> xs) {
  Cloud c(1, static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) c(0, i++) = x;
  return EmpiricalMeasure::uniform(c);
}

}  // namespace

TEST_CASE("assignment solver matches permutation enumeration") {
  Rng rng(1);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int t = 0; t < 40; ++t) {
    const Eigen::Index n = 1 + t % 7;
    Mat c(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) c(i, j) = u(rng);
    const auto res = solve_assignment(c);
    CHECK(res.cost == doctest::Approx(brute_force_assignment(c)).epsilon(1e-12));
    std::vector<Eigen::Index> cols = res.row_to_col;
    std::sort(cols.begin(), cols.end());
    for (Eigen::Index i = 0; i < n; ++i) CHECK(cols[static_cast<std::size_t>(i)] == i);
  }
}

TEST_CASE("network simplex matches the unit-expansion oracle") {
  Rng rng(2);
  std::uniform_int_distribution<int> sz(1, 7), mass(0, 4);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  for (int t = 0; t < 200; ++t) {
    const int n1 = sz(rng), n2 = sz(rng);
    std::vector<std::int64_t> a(n1), b(n2);
    for (auto& v : a) v = mass(rng);
    a[0] += 1;
    const std::int64_t total = std::accumulate(a.begin(), a.end(), std::int64_t{0});
    // random composition of `total` into n2 parts
    std::fill(b.begin(), b.end(), 0);
    for (std::int64_t k = 0; k < total; ++k) b[static_cast<std::size_t>(rng() % n2)] += 1;
    Mat c(n1, n2);
    for (int i = 0; i < n1; ++i)
      for (int j = 0; j < n2; ++j) c(i, j) = (t % 5 == 0) ? std::floor(u(rng)) : u(rng);  // ties every 5th
    const auto res = solve_transport(c, a, b);
    CHECK(res.cost == doctest::Approx(expanded_assignment(c, a, b)).epsilon(1e-10));
    // plan is feasible and consistent with the reported cost
    std::vector<std::int64_t> out(n1, 0), in(n2, 0);
    double cost = 0;
    for (const auto& f : res.plan) {
      CHECK(f.amount > 0);
      out[static_cast<std::size_t>(f.source)] += f.amount;
      in[static_cast<std::size_t>(f.sink)] += f.amount;
      cost += static_cast<double>(f.amount) * c(f.source, f.sink);
    }
    CHECK(out == a);
    CHECK(in == b);
    CHECK(cost == doctest::Approx(res.cost));
  }
}

TEST_CASE("transport input validation") {
  Mat c = Mat::Ones(2, 2);
  CHECK_THROWS_AS(solve_transport(c, {1, 1}, {1, 2}), std::invalid_argument);
  CHECK_THROWS_AS(solve_transport(c, {1, 1}, {2}), std::invalid_argument);
  CHECK_THROWS_AS(solve_transport(-c, {1, 1}, {1, 1}), std::invalid_argument);
}

TEST_CASE("W1 worked examples") {
  const auto a = line_measure({0.0, 1.0});
  CHECK(wasserstein1_exact(a, a) == 0.0);
  CHECK(wasserstein1_exact(line_measure({0.0}), line_measure({1.0})) == doctest::Approx(1.0));
  // both assignments: (0.5 + 0.5)/2 and (1.5 + 0.5)/2
  const double oracle = std::min((0.5 + 0.5) / 2, (1.5 + 0.5) / 2);
  CHECK(wasserstein1_exact(a, line_measure({0.5, 1.5})) == doctest::Approx(oracle).epsilon(1e-12));
  CHECK(wasserstein1_flow(a, line_measure({0.5, 1.5})) == doctest::Approx(oracle).epsilon(1e-12));
  CHECK_THROWS_AS(wasserstein1_exact(a, EmpiricalMeasure::uniform(Cloud::Zero(2, 1))), std::invalid_argument);
}

TEST_CASE("assignment route and flow route agree") {
  Rng rng(3);
  for (int t = 0; t < 30; ++t) {
    const Eigen::Index n = 5 + 7 * t;
    const auto mu = EmpiricalMeasure::uniform(random_cloud(2, n, rng));
    const auto nu = EmpiricalMeasure::uniform(random_cloud(2, n, rng));
    CHECK(std::abs(wasserstein1_assignment(mu, nu) - wasserstein1_flow(mu, nu)) <= 1e-9);
  }
}

TEST_CASE("W1 is a metric on desk-scale instances") {
  Rng rng(4);
  std::uniform_int_distribution<int> sz(1, 12);
  for (int t = 0; t < 1000; ++t) {
    const auto a = EmpiricalMeasure::uniform(random_cloud(2, sz(rng), rng));
    const auto b = EmpiricalMeasure::uniform(random_cloud(2, sz(rng), rng));
    const auto c = EmpiricalMeasure::uniform(random_cloud(2, sz(rng), rng));
    const double ab = wasserstein1_exact(a, b), ba = wasserstein1_exact(b, a);
    CHECK(std::abs(ab - ba) <= 1e-12);
    CHECK(ab <= wasserstein1_exact(a, c) + wasserstein1_exact(c, b) + 1e-9);
    CHECK(ab > 0.0);
  }
  // zero iff equal as weighted multisets: a permuted copy
  const Cloud pts = random_cloud(3, 9, rng);
  Cloud rev = pts.rowwise().reverse();
  CHECK(wasserstein1_exact(EmpiricalMeasure::uniform(pts), EmpiricalMeasure::uniform(rev)) <= 1e-12);
}

TEST_CASE("general weights") {
  Cloud x(1, 2), y(1, 3);
  x << 0.0, 1.0;
  y << 0.0, 0.5, 1.0;
  Vec wx(2), wy(3);
  wx << 0.25, 0.75;
  wy << 1.0 / 3, 1.0 / 3, 1.0 / 3;
  // 1-D W1 = integral of |F - G|: F jumps to .25 at 0 and 1 at 1; G is 1/3, 2/3 on [0,.5),[.5,1)
  const double oracle = 0.5 * std::abs(0.25 - 1.0 / 3) + 0.5 * std::abs(0.25 - 2.0 / 3);
  CHECK(wasserstein1_exact(EmpiricalMeasure(x, wx), EmpiricalMeasure(y, wy)) == doctest::Approx(oracle).epsilon(1e-12));

  Vec bad(2);
  bad << 1.0 / 1000003, 1.0 - 1.0 / 1000003;
  CHECK_THROWS_AS(wasserstein1_exact(EmpiricalMeasure(x, bad), EmpiricalMeasure(y, wy)), PrecisionError);
}

TEST_CASE("exact-OT cap") {
  Rng rng(5);
  const auto big = EmpiricalMeasure::uniform(random_cloud(2, kExactOtCap + 1, rng));
  const auto small = EmpiricalMeasure::uniform(random_cloud(2, 3, rng));
  CHECK_THROWS_AS(wasserstein1_exact(big, small), std::length_error);
}

TEST_CASE("orbit-space transport equals W1 of symmetrized measures") {
  Rng rng(6);
  for (const auto& g : {make_cyclic_rotation_group(4, 2), make_reflection_group(0, 2), make_cyclic_rotation_group(3, 2),
                        make_product_group(make_cyclic_rotation_group(2, 2), make_reflection_group(0, 2))}) {
    for (int t = 0; t < 10; ++t) {
      const auto mu = EmpiricalMeasure::uniform(random_cloud(2, 3 + t, rng));
      const auto nu = EmpiricalMeasure::uniform(random_cloud(2, 2 + 2 * t, rng));
      const double direct = wasserstein1_exact(symmetrize_measure(g, mu), symmetrize_measure(g, nu));
      CHECK(wasserstein1_symmetrized(g, mu, nu) == doctest::Approx(direct).epsilon(1e-9));
    }
  }
}

TEST_CASE("serial and parallel cost kernels agree bitwise") {
  Rng rng(7);
  const Cloud a = random_cloud(3, 57, rng), b = random_cloud(3, 41, rng);
  Mat s, p;
  kernels::serial::pairwise_distance(a, b, s);
  kernels::parallel::pairwise_distance(a, b, p);
  CHECK(s == p);
  const auto g = make_cyclic_rotation_group(5, 3);
  const Cloud imgs = orbit_cloud(g, b);
  kernels::serial::blockwise_min_distance(a, imgs, 5, s);
  kernels::parallel::blockwise_min_distance(a, imgs, 5, p);
  CHECK(s == p);
}
