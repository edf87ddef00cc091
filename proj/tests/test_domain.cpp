#include "doctest.h"

#include "invgan/domain.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

using namespace invgan;

namespace {

Vec v2(double a, double b) { return Vec{{a, b}}; }

Vec polar(double r, double th) { return v2(r * std::cos(th), r * std::sin(th)); }

}  // namespace

TEST_CASE("builtin domains") {
  const auto ms = builtin_domain("mirror_square");
  CHECK(ms.in_X0(v2(0.5, 0.5)));
  CHECK_FALSE(ms.in_X0(v2(-0.5, 0.5)));
  CHECK(ms.in_X(v2(-0.5, 0.5)));
  CHECK(ms.group.order() == 2);
  CHECK(ms.diameter_X0 == doctest::Approx(std::sqrt(2.0)));

  const auto ds = builtin_domain("disk_sector_4");
  CHECK(ds.in_X0(v2(0.5, 0.0)));
  CHECK_FALSE(ds.in_X0(v2(0.0, 0.5)));
  CHECK(ds.group.order() == 4);

  const auto box = builtin_domain("box_3");
  CHECK(box.group.order() == 1);
  Rng rng(1);
  std::uniform_real_distribution<double> u(-0.5, 1.5);
  for (int i = 0; i < 500; ++i) {
    Vec x(3);
    for (int k = 0; k < 3; ++k) x(k) = u(rng);
    CHECK(box.in_X(x) == box.in_X0(x));
  }
  CHECK(builtin_domain("ball_3").dim == 3);
  CHECK(builtin_domain("circle_in_R3").dim == 3);
  CHECK_THROWS_AS(builtin_domain("torus"), std::invalid_argument);
  CHECK_THROWS_AS(builtin_domain("disk_sector_0"), std::invalid_argument);
}

TEST_CASE("X0 sampler stays inside X0") {
  for (const std::string name : {"mirror_square", "disk_sector_4", "disk_sector_3", "box_2", "ball_3", "circle_in_R3"}) {
    const auto spec = builtin_domain(name);
    Rng rng(7);
    const Cloud c = sample_X0_cloud(spec, 2000, rng);
    for (Eigen::Index j = 0; j < c.cols(); ++j) {
      CHECK(spec.in_X0(c.col(j)));
      CHECK(spec.in_X(c.col(j)));
    }
  }
}

TEST_CASE("project_T0 examples") {
  const auto ms = builtin_domain("mirror_square");
  const auto p = project_T0(ms, v2(-0.3, 0.5));
  CHECK(p.x0(0) == doctest::Approx(0.3));
  CHECK(p.x0(1) == doctest::Approx(0.5));
  CHECK(ms.group.element(p.sigma).matrix(0, 0) == -1.0);

  const auto q = project_T0(ms, v2(0.2, 0.7));
  CHECK(q.x0 == v2(0.2, 0.7));
  CHECK(q.sigma == ms.group.identity_index());
  CHECK_THROWS_AS(project_T0(ms, v2(0.2, 1.7)), OutOfDomainError);

  const auto ds = builtin_domain("disk_sector_4");
  const double pi = std::numbers::pi;
  const auto r = project_T0(ds, polar(0.5, 3 * pi / 4));
  CHECK((r.x0 - polar(0.5, pi / 4)).norm() <= 1e-12);
  const Mat& rot = ds.group.element(r.sigma).matrix;
  CHECK((rot - (Mat(2, 2) << 0, -1, 1, 0).finished()).norm() <= 1e-12);
}

TEST_CASE("T0 is idempotent, orbit-constant and consistent") {
  for (const std::string name : {"mirror_square", "disk_sector_4", "disk_sector_5"}) {
    const auto spec = builtin_domain(name);
    Rng rng(3);
    const Cloud c = sample_X0_cloud(spec, 1000, rng);
    for (Eigen::Index j = 0; j < c.cols(); ++j) {
      const Vec x0 = c.col(j);
      const auto self = project_T0(spec, x0);
      CHECK(self.x0 == x0);
      for (const auto& e : spec.group.elements()) {
        const Vec x = e.matrix * x0;
        const auto p = project_T0(spec, x);
        CHECK(spec.in_X0(p.x0));
        CHECK((p.x0 - x0).norm() <= 1e-9);
        CHECK((spec.group.element(p.sigma).matrix * p.x0 - x).norm() <= 1e-9);
        // Uniqueness of the representative.
        int hits = 0;
        for (const auto& f : spec.group.elements()) hits += spec.in_X0(f.matrix.transpose() * x) ? 1 : 0;
        CHECK(hits >= 1);
      }
    }
  }
}

TEST_CASE("boundary points resolve deterministically") {
  const auto ds = builtin_domain("disk_sector_4");
  // On the ray theta = pi/2, i.e. the excluded boundary of the sector.
  const auto p = project_T0(ds, v2(0.0, 0.5));
  CHECK(ds.in_X0(p.x0));
  CHECK((p.x0 - v2(0.5, 0.0)).norm() <= 1e-12);
  const auto o = project_T0(ds, v2(0.0, 0.0));
  CHECK(o.x0.norm() == 0.0);
  CHECK(o.sigma == ds.group.identity_index());
  const auto ms = builtin_domain("mirror_square");
  const auto a = project_T0(ms, v2(0.0, 0.3));
  CHECK(a.sigma == ms.group.identity_index());
}

TEST_CASE("pushforward to domain") {
  const auto ds = builtin_domain("disk_sector_4");
  Cloud orb(2, 4);
  orb << 0.3, -0.1, -0.3, 0.1, 0.1, 0.3, -0.1, -0.3;
  const auto pf = pushforward_to_domain(ds, EmpiricalMeasure::uniform(orb));
  CHECK(pf.size() == 4);
  for (Eigen::Index j = 1; j < 4; ++j) CHECK((pf.point(j) - pf.point(0)).norm() <= 1e-12);

  const auto ms = builtin_domain("mirror_square");
  Rng rng(12);
  std::uniform_real_distribution<double> ux(-1, 1), uy(0, 1);
  Cloud c(2, 1000);
  for (Eigen::Index j = 0; j < c.cols(); ++j) c.col(j) = v2(ux(rng), uy(rng));
  const auto mu = EmpiricalMeasure::uniform(c);
  const auto out = pushforward_to_domain(ms, mu);
  CHECK(out.size() == mu.size());
  CHECK(std::abs(out.weights().sum() - 1.0) <= 1e-12);
  for (Eigen::Index j = 0; j < out.size(); ++j) CHECK(ms.in_X0(out.point(j)));

  Cloud inside(2, 2);
  inside << 0.1, 0.9, 0.2, 0.4;
  const auto same = pushforward_to_domain(ms, EmpiricalMeasure::uniform(inside));
  CHECK(same.points() == inside);
}

TEST_CASE("boundary-layer exponent fits") {
  const std::vector<double> grid{0.2, 0.1, 0.05, 0.025};
  for (const std::string name : {"mirror_square", "disk_sector_4"}) {
    const auto rep = check_assumption2(builtin_domain(name), grid, 20000, 5);
    REQUIRE(rep.rows.size() == 4);
    CHECK(rep.fitted_r == doctest::Approx(1.0).epsilon(0.3));
    for (const auto& row : rep.rows) CHECK(row.n_A0 <= row.n_X0);
  }
  const auto box = check_assumption2(builtin_domain("box_2"), grid, 2000, 5);
  CHECK(box.fitted_r == 0.0);
  for (const auto& row : box.rows) CHECK(row.n_violating == 0);
  CHECK_THROWS_AS(check_assumption2(builtin_domain("box_2"), grid, 10, 5), std::invalid_argument);

  std::stringstream ss;
  write_assumption2_csv(ss, box);
  std::string header;
  std::getline(ss, header);
  CHECK(header == "epsilon,n_violating,N_A0,N_X0,fitted_r");
}
