#include "invgan/domain.hpp"

#include "invgan/covering.hpp"
#include "invgan/fit.hpp"
#include "invgan/format.hpp"
#include "invgan/spatial_grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

namespace invgan {

namespace {

constexpr double kSlack = 1e-12;

double angle_0_2pi(double x, double y) {
  if (x == 0.0 && y == 0.0) return 0.0;
  double t = std::atan2(y, x);
  if (t < 0.0) t += 2.0 * std::numbers::pi;
  // atan2 may round a tiny negative angle up to exactly 2*pi.
  if (t >= 2.0 * std::numbers::pi) t = 0.0;
  return t;
}

double dist_to_segment(const Vec& p, const Vec& a, const Vec& b) {
  const Vec ab = b - a;
  const double t = std::clamp((p - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

int parse_suffix(const std::string& name, const std::string& prefix) {
  const std::string rest = name.substr(prefix.size());
  if (rest.empty() || rest.find_first_not_of("0123456789") != std::string::npos)
    throw std::invalid_argument("unknown domain '" + name + "'");
  return std::stoi(rest);
}

DomainSpec mirror_square() {
  DomainSpec s{"mirror_square", 2, make_reflection_group(0, 2), {}, {}, {}, {}, std::sqrt(2.0)};
  s.in_X = [](const Vec& x) {
    return x(0) >= -1.0 - kSlack && x(0) <= 1.0 + kSlack && x(1) >= -kSlack && x(1) <= 1.0 + kSlack;
  };
  s.in_X0 = [](const Vec& x) { return x(0) >= 0.0 && x(0) <= 1.0 && x(1) >= 0.0 && x(1) <= 1.0; };
  s.dist_to_X0 = [](const Vec& x) { return (x - x.cwiseMax(0.0).cwiseMin(1.0)).norm(); };
  s.sample_X0 = [](Rng& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Vec v(2);
    v(0) = u(rng);
    v(1) = u(rng);
    return v;
  };
  return s;
}

DomainSpec disk_sector(int k) {
  if (k < 1) throw std::invalid_argument("disk_sector needs k >= 1");
  const double wedge = 2.0 * std::numbers::pi / k;
  const double diam = k <= 2 ? 2.0 : std::max(1.0, 2.0 * std::sin(std::numbers::pi / k));
  DomainSpec s{"disk_sector_" + std::to_string(k), 2, make_cyclic_rotation_group(k, 2), {}, {}, {}, {}, diam};
  s.in_X = [](const Vec& x) { return x.norm() <= 1.0 + kSlack; };
  s.in_X0 = [wedge](const Vec& x) { return x.norm() <= 1.0 + kSlack && angle_0_2pi(x(0), x(1)) < wedge; };
  s.dist_to_X0 = [wedge, k](const Vec& x) {
    const double r = x.norm();
    const double t = angle_0_2pi(x(0), x(1));
    if (k == 1 || t < wedge) return std::max(0.0, r - 1.0);
    Vec o = Vec::Zero(2), a(2), b(2);
    a << 1.0, 0.0;
    b << std::cos(wedge), std::sin(wedge);
    return std::min(dist_to_segment(x, o, a), dist_to_segment(x, o, b));
  };
  s.sample_X0 = [wedge](Rng& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double r = std::sqrt(u(rng));
    const double t = wedge * u(rng);
    Vec v(2);
    v << r * std::cos(t), r * std::sin(t);
    return v;
  };
  return s;
}

DomainSpec box(int d) {
  if (d < 1) throw std::invalid_argument("box needs d >= 1");
  DomainSpec s{"box_" + std::to_string(d), d, make_trivial_group(d), {}, {}, {}, {}, std::sqrt(static_cast<double>(d))};
  s.in_X = [](const Vec& x) { return (x.array() >= -kSlack).all() && (x.array() <= 1.0 + kSlack).all(); };
  s.in_X0 = s.in_X;
  s.dist_to_X0 = [](const Vec& x) { return (x - x.cwiseMax(0.0).cwiseMin(1.0)).norm(); };
  s.sample_X0 = [d](Rng& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Vec v(d);
    for (int k = 0; k < d; ++k) v(k) = u(rng);
    return v;
  };
  return s;
}

DomainSpec ball(int d) {
  if (d < 1) throw std::invalid_argument("ball needs d >= 1");
  DomainSpec s{"ball_" + std::to_string(d), d, make_trivial_group(d), {}, {}, {}, {}, 2.0};
  s.in_X = [](const Vec& x) { return x.norm() <= 1.0 + kSlack; };
  s.in_X0 = s.in_X;
  s.dist_to_X0 = [](const Vec& x) { return std::max(0.0, x.norm() - 1.0); };
  s.sample_X0 = [d](Rng& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Vec v(d);
    for (int k = 0; k < d; ++k) v(k) = n(rng);
    return Vec(v.normalized() * std::pow(u(rng), 1.0 / d));
  };
  return s;
}

DomainSpec circle_in_r3() {
  DomainSpec s{"circle_in_R3", 3, make_trivial_group(3), {}, {}, {}, {}, 2.0};
  s.in_X = [](const Vec& x) { return std::abs(x.head(2).norm() - 1.0) <= kMatchTol && std::abs(x(2)) <= kMatchTol; };
  s.in_X0 = s.in_X;
  s.dist_to_X0 = [](const Vec& x) { return std::hypot(x.head(2).norm() - 1.0, x(2)); };
  s.sample_X0 = [](Rng& rng) {
    std::uniform_real_distribution<double> u(0.0, 2.0 * std::numbers::pi);
    const double t = u(rng);
    Vec v(3);
    v << std::cos(t), std::sin(t), 0.0;
    return v;
  };
  return s;
}

}  // namespace

DomainSpec builtin_domain(const std::string& name) {
  if (name == "mirror_square") return mirror_square();
  if (name == "circle_in_R3") return circle_in_r3();
  if (name.rfind("disk_sector_", 0) == 0) return disk_sector(parse_suffix(name, "disk_sector_"));
  if (name.rfind("box_", 0) == 0) return box(parse_suffix(name, "box_"));
  if (name.rfind("ball_", 0) == 0) return ball(parse_suffix(name, "ball_"));
  throw std::invalid_argument("unknown domain '" + name + "'");
}

Projection project_T0(const DomainSpec& spec, const Vec& x) {
  if (x.size() != spec.dim) throw std::invalid_argument("point dimension does not match domain");
  if (!spec.in_X(x)) throw OutOfDomainError("point lies outside X");
  const auto& g = spec.group;
  std::vector<Vec> cands;
  cands.reserve(g.order());
  for (std::size_t i = 0; i < g.order(); ++i) {
    cands.push_back(g.element(g.inverse(i)).matrix * x);
    if (spec.in_X0(cands.back())) return {cands.back(), i};
  }
  for (std::size_t i = 0; i < g.order(); ++i)
    if (spec.dist_to_X0(cands[i]) <= kMatchTol) return {cands[i], i};
  throw DomainError("no orbit member of the point lies in X0");
}

EmpiricalMeasure pushforward_to_domain(const DomainSpec& spec, const EmpiricalMeasure& mu) {
  Cloud out(mu.dim(), mu.size());
  for (Eigen::Index i = 0; i < mu.size(); ++i) out.col(i) = project_T0(spec, mu.point(i)).x0;
  return EmpiricalMeasure(std::move(out), mu.weights());
}

Cloud sample_X0_cloud(const DomainSpec& spec, Eigen::Index n, Rng& rng) {
  Cloud c(spec.dim, n);
  for (Eigen::Index j = 0; j < n; ++j) c.col(j) = spec.sample_X0(rng);
  return c;
}

Assumption2Report check_assumption2(const DomainSpec& spec, const std::vector<double>& epsilons,
                                    Eigen::Index cloud_size, std::uint64_t seed) {
  if (cloud_size < 1000) throw std::invalid_argument("cloud_size must be at least 1000");
  for (double e : epsilons)
    if (!(e > 0.0)) throw std::invalid_argument("epsilons must be positive");
  Rng rng(seed);
  const Cloud cloud = sample_X0_cloud(spec, cloud_size, rng);
  const auto& g = spec.group;

  Assumption2Report rep;
  if (epsilons.empty()) return rep;
  const auto x0_order = farthest_point_order(cloud, *std::min_element(epsilons.begin(), epsilons.end()));

  std::vector<double> log_eps, log_ratio;
  for (double eps : epsilons) {
    std::vector<char> violating(static_cast<std::size_t>(cloud.cols()), 0);
    for (std::size_t t = 0; t < g.order(); ++t) {
      if (t == g.identity_index()) continue;
      const Cloud images = g.element(t).matrix * cloud;
      SpatialGrid grid(spec.dim, 2.0 * eps);
      grid.insert_all(images);
      for (Eigen::Index i = 0; i < cloud.cols(); ++i) {
        if (violating[static_cast<std::size_t>(i)]) continue;
        violating[static_cast<std::size_t>(i)] = grid.visit_neighbors(cloud.col(i).data(), [&](Eigen::Index j) {
          return (images.col(j) - cloud.col(i)).norm() <= 2.0 * eps;
        });
      }
    }
    std::vector<Eigen::Index> idx;
    for (Eigen::Index i = 0; i < cloud.cols(); ++i)
      if (violating[static_cast<std::size_t>(i)]) idx.push_back(i);
    Assumption2Row row{eps, static_cast<Eigen::Index>(idx.size()), 0, x0_order.count_for(eps)};
    if (!idx.empty()) {
      Cloud sub(cloud.rows(), static_cast<Eigen::Index>(idx.size()));
      for (std::size_t k = 0; k < idx.size(); ++k) sub.col(static_cast<Eigen::Index>(k)) = cloud.col(idx[k]);
      row.n_A0 = static_cast<Eigen::Index>(greedy_epsilon_net(sub, eps).size());
      log_eps.push_back(std::log(eps));
      log_ratio.push_back(std::log(static_cast<double>(row.n_A0) / static_cast<double>(row.n_X0)));
    }
    rep.rows.push_back(row);
  }
  if (log_eps.empty())
    rep.fitted_r = 0.0;
  else if (log_eps.size() == 1)
    rep.fitted_r = std::numeric_limits<double>::quiet_NaN();
  else
    rep.fitted_r = least_squares(log_eps, log_ratio).slope;
  return rep;
}

void write_assumption2_csv(std::ostream& os, const Assumption2Report& rep) {
  os << "epsilon,n_violating,N_A0,N_X0,fitted_r\n";
  for (const auto& r : rep.rows)
    os << fmt_double(r.epsilon) << ',' << r.n_violating << ',' << r.n_A0 << ',' << r.n_X0 << ','
       << fmt_double(rep.fitted_r) << '\n';
}

}  // namespace invgan
