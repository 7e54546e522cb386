#include "doctest.h"

#include "tslab/pde.hpp"

#include <cmath>
#include <functional>
#include <random>

using namespace tslab;

namespace {

using Fn = std::function<double(double, double)>;

HeightField sample(GraphDirection d, Eigen::VectorXd a, Eigen::VectorXd b, double h, const Fn& u) {
  HeightField f(d, std::move(a), std::move(b), h);
  for (Eigen::Index i = 0; i < f.na(); ++i)
    for (Eigen::Index j = 0; j < f.nb(); ++j) f.u(i, j) = u(f.a(i), f.b(j));
  return f;
}

HeightField with_boundary(GraphDirection d, double a0, double a1, double b0, double b1, double h, const Fn& u) {
  HeightField f = sample(d, uniform_nodes(a0, a1, h), uniform_nodes(b0, b1, h), h, u);
  for (Eigen::Index i = 0; i < f.na(); ++i)
    for (Eigen::Index j = 0; j < f.nb(); ++j)
      if (!f.dirichlet(i, j)) f.u(i, j) = 0;
  return f;
}

double tilted_reaper(double a, double b, double zeta) {
  const double cz = std::cos(zeta);
  return -std::log(std::cos(a * cz)) / (cz * cz) + b * std::tan(zeta);
}

double max_error(const HeightField& f, const Fn& u) {
  double e = 0;
  for (Eigen::Index i = 0; i < f.na(); ++i)
    for (Eigen::Index j = 0; j < f.nb(); ++j) e = std::max(e, std::abs(f.u(i, j) - u(f.a(i), f.b(j))));
  return e;
}

// Non-divergence form with exact derivatives, for theta = pi/2.
double vertical_operator(double p, double q, double paa, double pab, double pbb) {
  const double W2 = 1 + p * p + q * q, W = std::sqrt(W2);
  return ((1 + q * q) * paa - 2 * p * q * pab + (1 + p * p) * pbb) / (W2 * W) - 1 / W;
}

}  // namespace

TEST_CASE("grim reaper solves the discrete equation to second order") {
  const auto gr = [](double a, double) { return -std::log(std::cos(a)); };
  double prev = 0;
  for (double h : {0.1, 0.05, 0.025}) {
    const HeightField f = sample(GraphDirection::vertical(), uniform_nodes(-1.2, 1.2, h), uniform_nodes(-1, 1, h), h, gr);
    const double r = max_free_residual(f);
    if (prev > 0) CHECK(prev / r > 3.2);
    prev = r;
  }
  CHECK(prev < 1e-3);
}

TEST_CASE("constant and zero fields") {
  const HeightField c0 = sample(GraphDirection::from_angle(0), uniform_nodes(-1, 1, 0.2), uniform_nodes(-1, 1, 0.2),
                                0.2, [](double, double) { return 3.7; });
  CHECK(max_free_residual(c0) < 1e-13);
  const HeightField z = sample(GraphDirection::vertical(), uniform_nodes(-1, 1, 0.2), uniform_nodes(-1, 1, 0.2), 0.2,
                               [](double, double) { return 0.0; });
  CHECK(pde_residual_at(z, 3, 4) == doctest::Approx(-1).epsilon(1e-14));
  CHECK_THROWS_AS(pde_residual_at(z, 0, 4), std::invalid_argument);
}

TEST_CASE("stencil matches the vertical graph operator on a smooth field") {
  const auto u = [](double a, double b) { return 0.3 * std::sin(a) * std::cos(0.7 * b) + 0.2 * a * b; };
  const double a0 = 0.31, b0 = -0.17;
  const double p = 0.3 * std::cos(a0) * std::cos(0.7 * b0) + 0.2 * b0;
  const double q = -0.21 * std::sin(a0) * std::sin(0.7 * b0) + 0.2 * a0;
  const double paa = -0.3 * std::sin(a0) * std::cos(0.7 * b0);
  const double pab = -0.21 * std::cos(a0) * std::sin(0.7 * b0) + 0.2;
  const double pbb = -0.147 * std::sin(a0) * std::cos(0.7 * b0);
  const double exact = vertical_operator(p, q, paa, pab, pbb);
  double prev = 0;
  for (double h : {0.02, 0.01, 0.005}) {
    Eigen::VectorXd a(3), b(3);
    a << a0 - h, a0, a0 + 1.3 * h;
    b << b0 - 0.8 * h, b0, b0 + h;
    const HeightField f = sample(GraphDirection::vertical(), a, b, h, u);
    const double err = std::abs(pde_residual_at(f, 1, 1) - exact);
    if (prev > 0) CHECK(prev / err > 1.8);
    prev = err;
  }
  CHECK(prev < 1e-3);
}

TEST_CASE("analytic Jacobian agrees with finite differences") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> U(-1, 1);
  for (double theta : {0.0, 0.6, 1.5707963267948966}) {
    HeightField f = sample(GraphDirection::from_angle(theta), graded_nodes(-1, 1, 0.25, {0.2}, 0.7, 3),
                           graded_nodes(-1, 1.5, 0.25, {-0.3}, 0.7, 2), 0.25,
                           [&](double a, double b) { return 0.8 * a * a - 0.5 * b + 0.3 * U(rng); });
    const Linearization L = linearize(f);
    const Eigen::MatrixXd J = Eigen::MatrixXd(L.jacobian);
    const double eps = 1e-6;
    double worst = 0;
    for (std::size_t col = 0; col < L.free_nodes.size(); col += 3) {
      const Eigen::Index k = L.free_nodes[col], i = k / f.nb(), j = k % f.nb();
      HeightField fp = f, fm = f;
      fp.u(i, j) += eps;
      fm.u(i, j) -= eps;
      const Eigen::VectorXd d = (linearize(fp).residual - linearize(fm).residual) / (2 * eps);
      worst = std::max(worst, (d - J.col(Eigen::Index(col))).cwiseAbs().maxCoeff() / (1 + d.cwiseAbs().maxCoeff()));
    }
    CHECK(worst < 1e-6);
  }
}

TEST_CASE("Dirichlet solve converges to a tilted grim reaper") {
  const double zeta = 0.7853981633974483;
  const Fn exact = [&](double a, double b) { return tilted_reaper(a, b, zeta); };
  double prev = 0;
  for (double h : {0.2, 0.1, 0.05}) {
    const HeightField f0 = with_boundary(GraphDirection::vertical(), -1.2, 1.2, -3, 3, h, exact);
    auto [f, rep] = solve_dirichlet(f0);
    REQUIRE(rep.converged);
    CHECK(rep.residual <= 1e-10);
    const double e = max_error(f, exact);
    if (prev > 0) CHECK(prev / e >= 3);
    prev = e;
  }
}

TEST_CASE("zero data with horizontal direction solves to zero") {
  const HeightField f0 = with_boundary(GraphDirection::from_angle(0), -1, 1, -2, 2, 0.1, [](double, double) { return 0.0; });
  auto [f, rep] = solve_dirichlet(f0);
  REQUIRE(rep.converged);
  CHECK(f.u.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("symmetric data gives an even solution") {
  const Fn data = [](double a, double b) { return 0.4 * a * a + 0.1 * b + 0.2 * std::cos(b); };
  const HeightField f0 = with_boundary(GraphDirection::vertical(), -1, 1, -1.5, 1.5, 0.1, data);
  auto [f, rep] = solve_dirichlet(f0);
  REQUIRE(rep.converged);
  double odd = 0;
  for (Eigen::Index i = 0; i < f.na(); ++i)
    for (Eigen::Index j = 0; j < f.nb(); ++j) odd = std::max(odd, std::abs(f.u(i, j) - f.u(f.na() - 1 - i, j)));
  CHECK(odd < 1e-9);
}

TEST_CASE("vertical graphs are invariant under vertical translation") {
  const Fn data = [](double a, double b) { return std::sin(a + b); };
  const HeightField f0 = with_boundary(GraphDirection::vertical(), -1, 1, -1, 1, 0.1, data);
  HeightField f1 = f0;
  for (Eigen::Index i = 0; i < f1.na(); ++i)
    for (Eigen::Index j = 0; j < f1.nb(); ++j)
      if (f1.dirichlet(i, j)) f1.u(i, j) += 2.5;
  auto [s0, r0] = solve_dirichlet(f0);
  auto [s1, r1] = solve_dirichlet(f1);
  REQUIRE(r0.converged);
  REQUIRE(r1.converged);
  CHECK((s1.u.array() - s0.u.array() - 2.5).abs().maxCoeff() < 1e-9);
}

TEST_CASE("ordered data gives ordered solutions") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> U(0, 1);
  for (int trial = 0; trial < 6; ++trial) {
    const double theta = 1.5707963267948966 * U(rng);
    const double k = 2 * U(rng) - 1, lift = 0.05 + U(rng);
    const Fn lower = [&](double a, double b) { return k * a * b + 0.3 * std::sin(3 * a); };
    const Fn upper = [&](double a, double b) { return lower(a, b) + lift * (1 + 0.5 * std::cos(b)); };
    auto [s0, r0] = solve_dirichlet(with_boundary(GraphDirection::from_angle(theta), -1, 1, -1, 1, 0.125, lower));
    auto [s1, r1] = solve_dirichlet(with_boundary(GraphDirection::from_angle(theta), -1, 1, -1, 1, 0.125, upper));
    REQUIRE(r0.converged);
    REQUIRE(r1.converged);
    CHECK((s1.u - s0.u).minCoeff() >= -1e-10);
  }
}

TEST_CASE("solver reports damping and rejects a free grid-boundary node") {
  HeightField f = with_boundary(GraphDirection::vertical(), -1, 1, -1, 1, 0.25, [](double, double) { return 0.0; });
  auto [s, rep] = solve_dirichlet(f);
  CHECK(rep.converged);
  CHECK(rep.damping.size() == std::size_t(rep.iterations));
  f.dirichlet(0, 2) = false;
  CHECK_THROWS_AS(solve_dirichlet(f), std::invalid_argument);
}

TEST_CASE("solutions of vertical graphs lie above the grim reaper barrier") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> U(-1, 1);
  for (int trial = 0; trial < 4; ++trial) {
    const double k0 = U(rng), k1 = U(rng), k2 = 2 * U(rng);
    const Fn data = [&](double a, double b) { return k0 * a * b + k1 * std::sin(2 * b) + k2 * a; };
    const HeightField f0 = with_boundary(GraphDirection::vertical(), -2, 2, -1.5, 3, 0.1, data);
    auto [f, rep] = solve_dirichlet(f0);
    REQUIRE(rep.converged);
    const Linearization L = linearize(f);
    const Eigen::VectorXd lower = lower_barrier(f, L.free_nodes);
    double worst = -1e300;
    for (std::size_t r = 0; r < L.free_nodes.size(); ++r) {
      const Eigen::Index i = L.free_nodes[r] / f.nb(), j = L.free_nodes[r] % f.nb();
      worst = std::max(worst, lower(Eigen::Index(r)) - f.u(i, j));
    }
    CHECK(worst <= 1e-3);
  }
}
