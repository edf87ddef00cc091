#include "invgan/ot.hpp"

#include "invgan/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace invgan {

AssignmentResult solve_assignment(const Mat& cost) {
  const Eigen::Index n = cost.rows();
  if (cost.cols() != n) throw std::invalid_argument("assignment needs a square cost matrix");
  AssignmentResult res;
  if (n == 0) return res;

  // Shortest augmenting paths with row/column potentials, 1-based with a
  // sentinel column 0.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<Eigen::Index> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (Eigen::Index i = 1; i <= n; ++i) {
    p[0] = i;
    Eigen::Index j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const Eigen::Index i0 = p[j0];
      double delta = inf;
      Eigen::Index j1 = 0;
      for (Eigen::Index j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (Eigen::Index j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const Eigen::Index j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  res.row_to_col.assign(static_cast<std::size_t>(n), -1);
  for (Eigen::Index j = 1; j <= n; ++j)
    if (p[j] != 0) res.row_to_col[static_cast<std::size_t>(p[j] - 1)] = j - 1;
  // Sum the plan directly rather than trusting the dual value.
  for (Eigen::Index i = 0; i < n; ++i) res.cost += cost(i, res.row_to_col[static_cast<std::size_t>(i)]);
  return res;
}

namespace {

// Primal network simplex on the bipartite transportation graph, following the
// spanning-tree bookkeeping (thread / succ_num / last_succ) of the LEMON
// implementation. All arcs are uncapacitated, so non-tree arcs carry zero
// flow and only the tree arc above each node needs a stored flow.
class TransportSimplex {
 public:
  TransportSimplex(const Mat& cost, const std::vector<std::int64_t>& supply, const std::vector<std::int64_t>& demand)
      : cost_(cost),
        n1_(cost.rows()),
        n2_(cost.cols()),
        nodes_(n1_ + n2_),
        arcs_(n1_ * n2_),
        root_(nodes_) {
    const std::size_t total = static_cast<std::size_t>(nodes_ + 1);
    parent_.assign(total, -1);
    pred_.assign(total, -1);
    dir_.assign(total, kUp);
    flow_.assign(total, 0);
    thread_.assign(total, 0);
    rev_thread_.assign(total, 0);
    succ_num_.assign(total, 0);
    last_succ_.assign(total, 0);
    pi_.assign(total, 0.0);
    art_src_.assign(static_cast<std::size_t>(nodes_), 0);
    art_tgt_.assign(static_cast<std::size_t>(nodes_), 0);
    art_cost_.assign(static_cast<std::size_t>(nodes_), 0.0);

    const double max_cost = arcs_ ? cost.maxCoeff() : 0.0;
    if (arcs_ && cost.minCoeff() < 0.0) throw std::invalid_argument("transport costs must be nonnegative");
    const double art = (max_cost + 1.0) * static_cast<double>(nodes_ + 1);
    tol_ = 64.0 * std::numeric_limits<double>::epsilon() * art;

    parent_[root_] = -1;
    pred_[root_] = -1;
    thread_[root_] = 0;
    rev_thread_[0] = root_;
    succ_num_[root_] = nodes_ + 1;
    last_succ_[root_] = nodes_ - 1;
    for (Eigen::Index u = 0; u < nodes_; ++u) {
      const std::int64_t s = u < n1_ ? supply[static_cast<std::size_t>(u)] : -demand[static_cast<std::size_t>(u - n1_)];
      parent_[u] = root_;
      pred_[u] = arcs_ + u;
      thread_[u] = u + 1;
      rev_thread_[u + 1] = u;
      succ_num_[u] = 1;
      last_succ_[u] = u;
      if (s >= 0) {
        dir_[u] = kUp;
        pi_[u] = 0.0;
        art_src_[u] = u;
        art_tgt_[u] = root_;
        flow_[u] = s;
        art_cost_[u] = 0.0;
      } else {
        dir_[u] = kDown;
        pi_[u] = art;
        art_src_[u] = root_;
        art_tgt_[u] = u;
        flow_[u] = -s;
        art_cost_[u] = art;
      }
    }
    block_ = std::max<Eigen::Index>(static_cast<Eigen::Index>(std::sqrt(static_cast<double>(arcs_))), 10);
  }

  TransportResult run() {
    TransportResult res;
    while (find_entering()) {
      find_join();
      if (!find_leaving()) throw std::runtime_error("transport problem is unbounded");
      change_flow();
      update_tree();
      update_potential();
      ++res.pivots;
    }
    for (Eigen::Index u = 0; u < nodes_; ++u) {
      if (pred_[u] >= arcs_ && flow_[u] != 0) throw std::invalid_argument("supplies and demands are unbalanced");
      if (pred_[u] < arcs_ && flow_[u] > 0) {
        const Eigen::Index a = pred_[u];
        const Eigen::Index i = a % n1_, j = a / n1_;
        res.plan.push_back({i, j, flow_[u]});
        res.cost += static_cast<double>(flow_[u]) * cost_(i, j);
      }
    }
    std::sort(res.plan.begin(), res.plan.end(), [](const FlowEntry& x, const FlowEntry& y) {
      return x.source != y.source ? x.source < y.source : x.sink < y.sink;
    });
    return res;
  }

 private:
  static constexpr int kUp = 1;
  static constexpr int kDown = -1;

  Eigen::Index src(Eigen::Index a) const { return a < arcs_ ? a % n1_ : art_src_[a - arcs_]; }
  Eigen::Index tgt(Eigen::Index a) const { return a < arcs_ ? n1_ + a / n1_ : art_tgt_[a - arcs_]; }
  double arc_cost(Eigen::Index a) const { return a < arcs_ ? cost_.data()[a] : art_cost_[a - arcs_]; }

  // Block search pricing over the real arcs; arc a = i + j * n1 matches the
  // column-major cost layout.
  bool find_entering() {
    if (arcs_ == 0) return false;
    const double* c = cost_.data();
    double best = 0.0;
    Eigen::Index cnt = block_;
    Eigen::Index i = next_arc_ % n1_, j = next_arc_ / n1_;
    for (Eigen::Index step = 0; step < arcs_; ++step) {
      const Eigen::Index a = i + j * n1_;
      const double rc = c[a] + pi_[i] - pi_[n1_ + j];
      if (rc < best) {
        best = rc;
        in_arc_ = a;
      }
      if (++i == n1_) {
        i = 0;
        if (++j == n2_) j = 0;
      }
      if (--cnt == 0) {
        if (best < -tol_) {
          next_arc_ = i + j * n1_;
          return true;
        }
        cnt = block_;
      }
    }
    if (best < -tol_) {
      next_arc_ = i + j * n1_;
      return true;
    }
    return false;
  }

  void find_join() {
    Eigen::Index u = src(in_arc_), v = tgt(in_arc_);
    while (u != v) {
      if (succ_num_[u] < succ_num_[v])
        u = parent_[u];
      else
        v = parent_[v];
    }
    join_ = u;
  }

  bool find_leaving() {
    const Eigen::Index first = src(in_arc_), second = tgt(in_arc_);
    const std::int64_t inf = std::numeric_limits<std::int64_t>::max();
    delta_ = inf;
    int result = 0;
    for (Eigen::Index u = first; u != join_; u = parent_[u]) {
      const std::int64_t d = dir_[u] == kUp ? flow_[u] : inf;
      if (d < delta_) {
        delta_ = d;
        u_out_ = u;
        result = 1;
      }
    }
    for (Eigen::Index u = second; u != join_; u = parent_[u]) {
      const std::int64_t d = dir_[u] == kDown ? flow_[u] : inf;
      if (d <= delta_) {
        delta_ = d;
        u_out_ = u;
        result = 2;
      }
    }
    if (result == 1) {
      u_in_ = first;
      v_in_ = second;
    } else {
      u_in_ = second;
      v_in_ = first;
    }
    return result != 0;
  }

  void change_flow() {
    if (delta_ <= 0) return;
    for (Eigen::Index u = src(in_arc_); u != join_; u = parent_[u]) flow_[u] -= dir_[u] * delta_;
    for (Eigen::Index u = tgt(in_arc_); u != join_; u = parent_[u]) flow_[u] += dir_[u] * delta_;
  }

  void update_tree() {
    const Eigen::Index old_rev_thread = rev_thread_[u_out_];
    const Eigen::Index old_succ_num = succ_num_[u_out_];
    const Eigen::Index old_last_succ = last_succ_[u_out_];
    v_out_ = parent_[u_out_];
    const int in_dir = u_in_ == src(in_arc_) ? kUp : kDown;

    if (u_in_ == u_out_) {
      parent_[u_in_] = v_in_;
      pred_[u_in_] = in_arc_;
      dir_[u_in_] = in_dir;
      flow_[u_in_] = delta_;
      if (thread_[v_in_] != u_out_) {
        Eigen::Index after = thread_[old_last_succ];
        thread_[old_rev_thread] = after;
        rev_thread_[after] = old_rev_thread;
        after = thread_[v_in_];
        thread_[v_in_] = u_out_;
        rev_thread_[u_out_] = v_in_;
        thread_[old_last_succ] = after;
        rev_thread_[after] = old_last_succ;
      }
    } else {
      const Eigen::Index thread_continue = old_rev_thread == v_in_ ? thread_[old_last_succ] : thread_[v_in_];

      // Re-hang the stem u_in .. u_out under v_in, splicing the thread list.
      Eigen::Index stem = u_in_;
      Eigen::Index par_stem = v_in_;
      Eigen::Index last = last_succ_[u_in_];
      Eigen::Index after = thread_[last];
      thread_[v_in_] = u_in_;
      dirty_revs_.clear();
      dirty_revs_.push_back(v_in_);
      while (stem != u_out_) {
        const Eigen::Index next_stem = parent_[stem];
        thread_[last] = next_stem;
        dirty_revs_.push_back(last);

        const Eigen::Index before = rev_thread_[stem];
        thread_[before] = after;
        rev_thread_[after] = before;

        parent_[stem] = par_stem;
        par_stem = stem;
        stem = next_stem;

        last = last_succ_[stem] == last_succ_[par_stem] ? rev_thread_[par_stem] : last_succ_[stem];
        after = thread_[last];
      }
      parent_[u_out_] = par_stem;
      thread_[last] = thread_continue;
      rev_thread_[thread_continue] = last;
      last_succ_[u_out_] = last;

      if (old_rev_thread != v_in_) {
        thread_[old_rev_thread] = after;
        rev_thread_[after] = old_rev_thread;
      }
      for (Eigen::Index u : dirty_revs_) rev_thread_[thread_[u]] = u;

      // Reverse pred / dir / flow along the stem and fix subtree sizes.
      Eigen::Index tmp_sc = 0;
      const Eigen::Index tmp_ls = last_succ_[u_out_];
      for (Eigen::Index u = u_out_, p = parent_[u]; u != u_in_; u = p, p = parent_[u]) {
        pred_[u] = pred_[p];
        dir_[u] = -dir_[p];
        flow_[u] = flow_[p];
        tmp_sc += succ_num_[u] - succ_num_[p];
        succ_num_[u] = tmp_sc;
        last_succ_[p] = tmp_ls;
      }
      pred_[u_in_] = in_arc_;
      dir_[u_in_] = in_dir;
      flow_[u_in_] = delta_;
      succ_num_[u_in_] = old_succ_num;
    }

    const Eigen::Index up_limit_out = last_succ_[join_] == v_in_ ? join_ : -1;
    const Eigen::Index last_succ_out = last_succ_[u_out_];
    for (Eigen::Index u = v_in_; u != -1 && last_succ_[u] == v_in_; u = parent_[u]) last_succ_[u] = last_succ_out;

    if (join_ != old_rev_thread && v_in_ != old_rev_thread) {
      for (Eigen::Index u = v_out_; u != up_limit_out && last_succ_[u] == old_last_succ; u = parent_[u])
        last_succ_[u] = old_rev_thread;
    } else if (last_succ_out != old_last_succ) {
      for (Eigen::Index u = v_out_; u != up_limit_out && last_succ_[u] == old_last_succ; u = parent_[u])
        last_succ_[u] = last_succ_out;
    }

    for (Eigen::Index u = v_in_; u != join_; u = parent_[u]) succ_num_[u] += old_succ_num;
    for (Eigen::Index u = v_out_; u != join_; u = parent_[u]) succ_num_[u] -= old_succ_num;
  }

  void update_potential() {
    const double sigma = pi_[v_in_] - pi_[u_in_] - dir_[u_in_] * arc_cost(in_arc_);
    const Eigen::Index end = thread_[last_succ_[u_in_]];
    for (Eigen::Index u = u_in_; u != end; u = thread_[u]) pi_[u] += sigma;
  }

  const Mat& cost_;
  Eigen::Index n1_, n2_, nodes_, arcs_, root_;
  double tol_ = 0.0;
  Eigen::Index block_ = 10;
  Eigen::Index next_arc_ = 0;

  std::vector<Eigen::Index> parent_, pred_, thread_, rev_thread_, succ_num_, last_succ_;
  std::vector<int> dir_;
  std::vector<std::int64_t> flow_;
  std::vector<double> pi_;
  std::vector<Eigen::Index> art_src_, art_tgt_;
  std::vector<double> art_cost_;
  std::vector<Eigen::Index> dirty_revs_;

  Eigen::Index in_arc_ = -1, join_ = -1, u_in_ = -1, v_in_ = -1, u_out_ = -1, v_out_ = -1;
  std::int64_t delta_ = 0;
};

bool to_fraction(double x, std::int64_t max_den, std::int64_t& num, std::int64_t& den) {
  constexpr double kTol = 1e-13;
  std::int64_t p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double r = x;
  for (int it = 0; it < 64; ++it) {
    const double a = std::floor(r);
    if (a > 9e15) break;
    const auto ai = static_cast<std::int64_t>(a);
    const std::int64_t p2 = ai * p1 + p0, q2 = ai * q1 + q0;
    if (q2 > max_den) break;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    if (std::abs(x - static_cast<double>(p1) / static_cast<double>(q1)) <= kTol) break;
    const double frac = r - a;
    if (frac < 1e-300) break;
    r = 1.0 / frac;
  }
  if (q1 == 0) return false;
  num = p1;
  den = q1;
  return std::abs(x - static_cast<double>(p1) / static_cast<double>(q1)) <= kTol;
}

void check_cap(Eigen::Index n) {
  if (n > kExactOtCap)
    throw std::length_error("measure with " + std::to_string(n) + " points exceeds the exact-OT cap of " +
                            std::to_string(kExactOtCap) + "; subsample first");
}

// Drops zero-weight entries; returns kept indices.
std::vector<Eigen::Index> support(const Vec& w) {
  std::vector<Eigen::Index> idx;
  for (Eigen::Index i = 0; i < w.size(); ++i)
    if (w(i) > 0.0) idx.push_back(i);
  return idx;
}

}  // namespace

TransportResult solve_transport(const Mat& cost, const std::vector<std::int64_t>& supply,
                                const std::vector<std::int64_t>& demand) {
  if (static_cast<Eigen::Index>(supply.size()) != cost.rows() || static_cast<Eigen::Index>(demand.size()) != cost.cols())
    throw std::invalid_argument("supply/demand sizes do not match the cost matrix");
  const std::int64_t s = std::accumulate(supply.begin(), supply.end(), std::int64_t{0});
  const std::int64_t d = std::accumulate(demand.begin(), demand.end(), std::int64_t{0});
  if (s != d) throw std::invalid_argument("total supply differs from total demand");
  if (std::any_of(supply.begin(), supply.end(), [](auto v) { return v < 0; }) ||
      std::any_of(demand.begin(), demand.end(), [](auto v) { return v < 0; }))
    throw std::invalid_argument("negative supply or demand");
  TransportSimplex simplex(cost, supply, demand);
  return simplex.run();
}

std::int64_t rationalize(const Vec& a, const Vec& b, std::vector<std::int64_t>& ia, std::vector<std::int64_t>& ib) {
  std::int64_t lcm = 1;
  auto scan = [&](const Vec& w) {
    for (Eigen::Index i = 0; i < w.size(); ++i) {
      std::int64_t num = 0, den = 1;
      if (!to_fraction(w(i), kMaxDenominator, num, den))
        throw PrecisionError("weight " + std::to_string(w(i)) + " has no fraction with denominator <= 1e6");
      lcm = std::lcm(lcm, den);
      if (lcm > kMaxDenominator) throw PrecisionError("common weight denominator exceeds 1e6");
    }
  };
  scan(a);
  scan(b);
  auto scale = [&](const Vec& w, std::vector<std::int64_t>& out) {
    out.resize(static_cast<std::size_t>(w.size()));
    std::int64_t total = 0;
    for (Eigen::Index i = 0; i < w.size(); ++i) {
      out[static_cast<std::size_t>(i)] = std::llround(w(i) * static_cast<double>(lcm));
      total += out[static_cast<std::size_t>(i)];
    }
    if (total != lcm) throw PrecisionError("scaled weights do not sum to the common denominator");
  };
  scale(a, ia);
  scale(b, ib);
  return lcm;
}

double transport_cost(const Mat& cost, const Vec& wa, const Vec& wb) {
  const auto ka = support(wa), kb = support(wb);
  Mat c(static_cast<Eigen::Index>(ka.size()), static_cast<Eigen::Index>(kb.size()));
  Vec a(c.rows()), b(c.cols());
  for (std::size_t j = 0; j < kb.size(); ++j) {
    b(static_cast<Eigen::Index>(j)) = wb(kb[j]);
    for (std::size_t i = 0; i < ka.size(); ++i) c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = cost(ka[i], kb[j]);
  }
  for (std::size_t i = 0; i < ka.size(); ++i) a(static_cast<Eigen::Index>(i)) = wa(ka[i]);
  std::vector<std::int64_t> ia, ib;
  const std::int64_t den = rationalize(a, b, ia, ib);
  return solve_transport(c, ia, ib).cost / static_cast<double>(den);
}

double wasserstein1_assignment(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
  if (mu.dim() != nu.dim()) throw std::invalid_argument("measures have different dimensions");
  if (mu.size() != nu.size() || !mu.is_uniform() || !nu.is_uniform())
    throw std::invalid_argument("assignment route needs equal-size uniform measures");
  check_cap(mu.size());
  Mat c;
  kernels::pairwise_distance(mu.points(), nu.points(), c);
  return solve_assignment(c).cost / static_cast<double>(mu.size());
}

double wasserstein1_flow(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
  if (mu.dim() != nu.dim()) throw std::invalid_argument("measures have different dimensions");
  check_cap(mu.size());
  check_cap(nu.size());
  Mat c;
  kernels::pairwise_distance(mu.points(), nu.points(), c);
  return transport_cost(c, mu.weights(), nu.weights());
}

double wasserstein1_exact(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
  if (mu.dim() != nu.dim()) throw std::invalid_argument("measures have different dimensions");
  if (mu.size() == nu.size() && mu.is_uniform() && nu.is_uniform()) return wasserstein1_assignment(mu, nu);
  return wasserstein1_flow(mu, nu);
}

double wasserstein1_symmetrized(const FiniteGroup& g, const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
  if (mu.dim() != nu.dim() || mu.dim() != g.dim()) throw std::invalid_argument("dimension mismatch");
  if (!g.is_orthogonal()) throw std::invalid_argument("orbit-space transport needs an orthogonal group");
  check_cap(mu.size());
  check_cap(nu.size());
  if (g.order() == 1) return wasserstein1_exact(mu, nu);
  Mat c;
  kernels::blockwise_min_distance(mu.points(), orbit_cloud(g, nu.points()), static_cast<Eigen::Index>(g.order()), c);
  if (mu.size() == nu.size() && mu.is_uniform() && nu.is_uniform())
    return solve_assignment(c).cost / static_cast<double>(mu.size());
  return transport_cost(c, mu.weights(), nu.weights());
}

}  // namespace invgan
