#include "doctest.h"

#include "tslab/differential.hpp"
#include "tslab/families.hpp"
#include "tslab/slab.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace tslab;

namespace {

constexpr double kPi = std::numbers::pi;

// Fixed-step classical RK4 for (f, f') from the two-term series at r = 1e-3.
double rk4_bowl(double r_end, double step) {
  auto rhs = [](double r, const std::array<double, 2>& y) {
    return std::array<double, 2>{y[1], (1 + y[1] * y[1]) * (1 - y[1] / r)};
  };
  double r = 1e-3;
  std::array<double, 2> y{r * r / 4 + std::pow(r, 4) / 128, r / 2 + std::pow(r, 3) / 32};
  const int n = int(std::llround((r_end - r) / step));
  const double h = (r_end - r) / n;
  for (int k = 0; k < n; ++k) {
    auto add = [](const std::array<double, 2>& a, const std::array<double, 2>& b, double s) {
      return std::array<double, 2>{a[0] + s * b[0], a[1] + s * b[1]};
    };
    const auto k1 = rhs(r, y);
    const auto k2 = rhs(r + h / 2, add(y, k1, h / 2));
    const auto k3 = rhs(r + h / 2, add(y, k2, h / 2));
    const auto k4 = rhs(r + h, add(y, k3, h));
    for (int i = 0; i < 2; ++i) y[std::size_t(i)] += h / 6 * (k1[std::size_t(i)] + 2 * k2[std::size_t(i)] + 2 * k3[std::size_t(i)] + k4[std::size_t(i)]);
    r += h;
  }
  return y[0];
}

double max_residual(const TriMeshd& m) { return translator_residual(differential_quantities(m)).max_interior; }

}  // namespace

TEST_CASE("grim reaper closed form") {
  CHECK(grim_reaper_height(0, kPi / 3, 0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(grim_reaper_height(0, kPi / 3, 17.5) == doctest::Approx(0.693147).epsilon(1e-6));
  CHECK(grim_reaper_height(kPi / 4, 0, 2) == doctest::Approx(-2).epsilon(1e-15));
  CHECK(grim_reaper_half_width(kPi / 3) == doctest::Approx(kPi));

  GrimReaperParams p;
  p.zeta = 0.3;
  p.h = 0.1;
  p.y_extent = 4;
  p.z_cap = 6;
  const TriMeshd m = grim_reaper(p);
  double err = 0, top = -1e9, xmax = 0;
  for (Eigen::Index v = 0; v < m.num_vertices(); ++v) {
    const Vec3 q = m.point(v);
    err = std::max(err, std::abs(q.z() - grim_reaper_height(p.zeta, q.x(), q.y())));
    top = std::max(top, q.z() + q.y() * std::tan(p.zeta));
    xmax = std::max(xmax, std::abs(q.x()));
  }
  CHECK(err < 1e-9);
  CHECK(top == doctest::Approx(p.z_cap).epsilon(1e-9));
  CHECK(xmax < grim_reaper_half_width(p.zeta));

  p.zeta = kPi / 2;
  CHECK_THROWS_AS(grim_reaper(p), FamilyError);
}

TEST_CASE("grim reaper y-translation shifts height by tan zeta") {
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> u(-1, 1);
  for (double zeta : {0.0, 0.4, kPi / 4, 2.0, 2.9}) {
    const double hw = grim_reaper_half_width(zeta);
    for (int k = 0; k < 50; ++k) {
      const double x = 0.99 * hw * u(rng), y = 10 * u(rng), d = 5 * u(rng);
      const double lhs = grim_reaper_height(zeta, x, y + d);
      const double rhs = grim_reaper_height(zeta, x, y) - d * std::tan(zeta);
      CHECK(std::abs(lhs - rhs) <= 1e-12 * (1 + std::abs(lhs)));
    }
  }
}

TEST_CASE("grim reaper widths") {
  for (double zeta : {0.0, kPi / 4, kPi / 3}) {
    GrimReaperParams p;
    p.zeta = zeta;
    p.h = 0.1;
    p.z_cap = 20;
    const SlabFit<double> fit = fit_slab(grim_reaper(p));
    CHECK(std::abs(fit.width - kPi / std::cos(zeta)) <= 2 * p.h);
    CHECK(std::abs(fit.normal.z()) < 1e-9);
  }
}

TEST_CASE("family meshes refine toward translators") {
  GrimReaperParams p;
  p.zeta = 0.5;
  p.y_extent = 1;
  p.z_cap = 3;
  p.h = 0.04;
  const double g1 = max_residual(grim_reaper(p));
  p.h = 0.02;
  const double g2 = max_residual(grim_reaper(p));
  CHECK(g2 < g1 / 3);

  const double b1 = max_residual(bowl(4, 0.1).mesh);
  const double b2 = max_residual(bowl(4, 0.05).mesh);
  CHECK(b2 < b1 / 3);
  MESSAGE("grim reaper " << g1 << " -> " << g2 << ", bowl " << b1 << " -> " << b2);

  CHECK(max_residual(calibration_surface(FamilyTag::plane, {{"x0", 0}, {"y_extent", 10}, {"z_extent", 10}}, 0.5)) <
        1e-12);
}

TEST_CASE("bowl profile") {
  const BowlProfile p = bowl_profile(60);
  CHECK(p.value(0) == 0);
  CHECK(p.slope(0) == 0);
  CHECK(p.value(1e-3) == doctest::Approx(2.5e-7).epsilon(1e-6));

  const double oracle = rk4_bowl(10, 0.0025);
  CHECK(std::abs(p.value(10) - oracle) < 1e-6);
  MESSAGE("f(10) = " << p.value(10) << ", RK4 " << oracle);

  for (double r = 0.01; r <= 60; r += 0.37) CHECK(p.curvature(r) > 0);

  // Unit-speed normalization: f = r^2 / 2 - log r + C + o(1).
  auto g = [&](double r) { return p.value(r) - (r * r / 2 - std::log(r)); };
  CHECK(std::abs(g(60) - g(50)) < 0.1 * std::abs(g(20) - g(10)));
  CHECK(std::abs(g(60) - g(50)) < 1e-3);
  CHECK(g(60) == doctest::Approx(-0.652).epsilon(1e-3));

  CHECK_THROWS_AS(bowl_profile(1), FamilyError);
}

// f grows like r^2 / 2, so the quarter-coefficient asymptote misses by about r^2 / 4.
TEST_CASE("bowl quarter asymptote" * doctest::should_fail()) {
  const BowlProfile p = bowl_profile(60);
  auto d = [&](double r) { return std::abs(p.value(r) - (r * r / 4 - std::log(r))); };
  CHECK(d(50) < d(10));
  CHECK(d(50) <= 0.1);
}

TEST_CASE("calibration surfaces and family specs") {
  const TriMeshd plane = calibration_surface(FamilyTag::plane, {{"x0", 2}}, 0.5);
  const SlabFit<double> fit = fit_slab(plane);
  CHECK(fit.width == doctest::Approx(0).epsilon(1e-12));
  CHECK(std::abs(std::abs(fit.normal.x()) - 1) < 1e-12);
  CHECK(fit.offset * fit.normal.x() == doctest::Approx(2));

  const TriMeshd cyl = calibration_surface(FamilyTag::shrinker_cylinder, {}, 0.1);
  double rmin = 1e9, rmax = 0;
  for (Eigen::Index v = 0; v < cyl.num_vertices(); ++v) {
    const double r = std::hypot(cyl.point(v).x(), cyl.point(v).y());
    rmin = std::min(rmin, r);
    rmax = std::max(rmax, r);
  }
  CHECK(rmin == doctest::Approx(std::sqrt(2.0)));
  CHECK(rmax == doctest::Approx(std::sqrt(2.0)));
  CHECK_THROWS_AS(calibration_surface(FamilyTag::bowl, {}, 0.1), FamilyError);

  FamilySpec s;
  s.tag = FamilyTag::grim_reaper;
  s.zeta = kPi / 2;
  CHECK_THROWS_AS(s.validate(), FamilyError);
  s.zeta = 0.2;
  s.h = 0;
  CHECK_THROWS_AS(s.validate(), FamilyError);
  s.h = 0.1;
  s.y_extent = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(s.validate(), FamilyError);
  CHECK(parse_family_tag(to_string(FamilyTag::shrinker_cylinder)) == FamilyTag::shrinker_cylinder);
  CHECK_THROWS_AS(parse_family_tag("scherk"), FamilyError);
}
