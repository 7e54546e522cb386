#include "doctest.h"

#include "fixtures.hpp"
#include "tslab/differential.hpp"
#include "tslab/families.hpp"
#include "tslab/height_field.hpp"
#include "tslab/rado.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

using namespace tslab;

namespace {

constexpr double kPi = std::numbers::pi;

Vec3 on_equator(double phi) { return {std::cos(phi), std::sin(phi), 0}; }

// Hexagonal patch of the triangular lattice, z = f(x, y); the center vertex
// has six neighbours at 60 degree spacing.
TriMeshd lattice_graph(const std::function<double(double, double)>& f, int n, double h) {
  const double r3 = std::sqrt(3.0) / 2;
  std::map<std::pair<int, int>, int> id;
  std::vector<Vec3> pts;
  for (int i = -n; i <= n; ++i)
    for (int j = -n; j <= n; ++j)
      if (std::abs(i + j) <= n) {
        const double x = h * (i + 0.5 * j), y = h * r3 * j;
        id[{i, j}] = int(pts.size());
        pts.emplace_back(x, y, f(x, y));
      }
  std::vector<std::array<int, 3>> tris;
  auto at = [&](int i, int j) {
    const auto it = id.find({i, j});
    return it == id.end() ? -1 : it->second;
  };
  for (const auto& [k, v] : id) {
    const auto [i, j] = k;
    const int a = at(i + 1, j), b = at(i, j + 1), c = at(i + 1, j - 1);
    if (a >= 0 && b >= 0) tris.push_back({v, a, b});
    if (a >= 0 && c >= 0) tris.push_back({v, c, a});
  }
  VertexMatrix<double> V(Eigen::Index(pts.size()), 3);
  for (std::size_t k = 0; k < pts.size(); ++k) V.row(Eigen::Index(k)) = pts[k].transpose();
  FaceMatrix F(Eigen::Index(tris.size()), 3);
  for (std::size_t k = 0; k < tris.size(); ++k) F.row(Eigen::Index(k)) << tris[k][0], tris[k][1], tris[k][2];
  return TriMeshd(V, F);
}

TriMeshd monkey_saddle() {
  return lattice_graph([](double x, double y) { return std::pow(std::hypot(x, y), 3) * std::sin(3 * (std::atan2(y, x) - 0.1)); },
                       12, 0.1);
}

// Graph in direction v_theta over a grid with a random trigonometric height.
TriMeshd random_graph(std::mt19937& rng, double theta) {
  std::uniform_real_distribution<double> u(-1, 1);
  const double c[6] = {u(rng), u(rng), u(rng), u(rng), 2 * u(rng), 2 * u(rng)};
  HeightField f(GraphDirection::from_angle(theta), uniform_nodes(-2, 2, 0.2), uniform_nodes(-2, 2, 0.2), 0.2);
  for (Eigen::Index i = 0; i < f.na(); ++i)
    for (Eigen::Index j = 0; j < f.nb(); ++j) {
      const double a = f.a(i), b = f.b(j);
      f.u(i, j) = c[0] * std::sin(a + c[4]) + c[1] * std::cos(b * c[5]) + c[2] * a * b + c[3] * a * a;
    }
  return height_field_mesh(f);
}

double axis_distance(const Vec3& p) { return std::hypot(p.x(), p.y()); }

}  // namespace

TEST_CASE("monkey saddle has one critical vertex of multiplicity two") {
  const TriMeshd m = monkey_saddle();
  const RadoReport r = rado_critical_points(m, Vec3::UnitZ());
  REQUIRE(r.critical.size() == 1);
  CHECK(r.critical[0].multiplicity == 2);
  CHECK(r.N == 2);
  CHECK(m.point(r.critical[0].vertex).norm() < 1e-12);
  CHECK(r.extrema.empty());
}

TEST_CASE("saddle and bump") {
  const TriMeshd saddle = lattice_graph([](double x, double y) { return x * x - 0.7 * x * y - y * y; }, 10, 0.1);
  const RadoReport s = rado_critical_points(saddle, Vec3::UnitZ());
  CHECK(s.N == 1);
  CHECK(s.critical.size() == 1);

  const TriMeshd bump = fixtures::graph_mesh([](double x, double y) { return -x * x - 2 * y * y; }, -1, 1, -1, 1, 0.1);
  const RadoReport b = rado_critical_points(bump, Vec3::UnitZ());
  CHECK(b.N == 0);
  CHECK(b.extrema.size() == 1);

  const TriMeshd sphere = fixtures::icosphere(1, 3);
  const RadoReport g = rado_critical_points(sphere, Vec3(0.3, -0.2, 0.9));
  CHECK(g.N == 0);
  CHECK(g.extrema.size() == 2);

  CHECK_THROWS_AS(rado_critical_points(sphere, Vec3::Zero()), RadoError);
}

TEST_CASE("grid ties are broken consistently") {
  const TriMeshd plane = fixtures::graph_mesh([](double, double) { return 0.0; }, -1, 1, -1, 1, 0.25);
  for (const Vec3& nu : {Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)}) {
    const RadoReport r = rado_critical_points(plane, nu);
    CHECK(r.perturbed);
    CHECK(r.N == 0);
  }
}

TEST_CASE("critical count is invariant under translation and nu -> -nu") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-1, 1);
  const TriMeshd meshes[] = {monkey_saddle(), fixtures::icosphere(1.5, 2), random_graph(rng, 0.7)};
  for (const TriMeshd& m : meshes)
    for (int k = 0; k < 20; ++k) {
      const Vec3 nu = Vec3(u(rng), u(rng), u(rng)).normalized();
      const Vec3 shift(5 * u(rng), 5 * u(rng), 5 * u(rng));
      const int n0 = rado_critical_points(m, nu).N;
      CHECK(rado_critical_points(m, -nu).N == n0);
      CHECK(rado_critical_points(translated(m, shift), nu).N == n0);
    }
}

TEST_CASE("height functions transverse to the graph direction have no critical points") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> angle(0, kPi);
  for (int k = 0; k < 30; ++k) {
    const double theta = angle(rng);
    const GraphDirection d = GraphDirection::from_angle(theta);
    const TriMeshd m = random_graph(rng, theta);
    const double s = angle(rng);
    const Vec3 nu = std::cos(s) * Vec3::UnitX() + std::sin(s) * d.w();
    const RadoReport r = rado_critical_points(m, nu);
    CHECK(r.N == 0);
    CHECK(r.extrema.empty());
  }
}

TEST_CASE("delta-wing has no critical points of horizontal height functions") {
  const CappedSolve s = delta_wing(2, 8, 0.2);
  const TriMeshd m = height_field_mesh(s.field);
  CHECK(rado_critical_points(m, Vec3::UnitY()).N == 0);
  CHECK(rado_critical_points(m, on_equator(0.4)).N == 0);
}

TEST_CASE("zero set of H on simple surfaces") {
  const TriMeshd plane = differential_quantities(vertical_plane(0, 5, 5, 0.5));
  const HSet p = h_zero_set(plane);
  CHECK(p.identically_zero);
  CHECK(p.lines.empty());

  GrimReaperParams gp;
  gp.h = 0.1;
  gp.z_cap = 8;
  const TriMeshd gr = differential_quantities(grim_reaper(gp));
  for (HSource src : {HSource::mean_curvature, HSource::translator}) {
    const HSet g = h_zero_set(gr, src);
    CHECK(!g.identically_zero);
    CHECK(g.lines.empty());
    CHECK(gauss_equator_image(g).empty());
  }
  const TriMeshd bw = differential_quantities(bowl(4, 0.1).mesh);
  CHECK(h_zero_set(bw).lines.empty());
  CHECK(h_zero_set(bw, HSource::translator).lines.empty());

  CHECK(parse_h_source(to_string(HSource::translator)) == HSource::translator);
  CHECK_THROWS_AS(parse_h_source("gauss"), RadoError);
  CHECK_THROWS_AS(h_zero_set(vertical_plane(0, 5, 5, 0.5)), RadoError);
}

TEST_CASE("zero set curves cross sign changes and end on the boundary") {
  TriMeshd m = fixtures::graph_mesh([](double x, double y) { return 0.3 * std::sin(x) * std::sin(y); }, -4, 4, -4, 4, 0.1);
  m = differential_quantities(m);
  const HSet hs = h_zero_set(m);
  REQUIRE(!hs.lines.empty());
  const Eigen::VectorXd& H = hs.field;
  int interior = 0;
  for (Eigen::Index v = 0; v < H.size(); ++v) interior += !m.is_boundary(v) && H(v) == m.mean_curvature()(v);
  CHECK(interior == (!m.boundary()).count());
  for (const HPolyline& l : hs.lines) {
    CHECK(l.ends_on_boundary(m));
    REQUIRE(l.at.size() == l.pts.size());
    for (const EdgePoint& e : l.at) CHECK(H(e.a) * H(e.b) <= 0);
  }
}

TEST_CASE("isolated sign flips are absorbed") {
  TriMeshd m = fixtures::icosphere(1, 3);
  m = differential_quantities(m);
  Eigen::VectorXd H = m.mean_curvature();
  H(7) = -H(7);
  const TriMeshd flipped = m.with_curvature(m.normals(), H);
  const HSet hs = h_zero_set(flipped);
  CHECK(hs.anomalies == 1);
  CHECK(hs.lines.empty());
}

TEST_CASE("equator arcs") {
  std::vector<Vec3> path;
  for (int k = 1; k <= 10; ++k) path.push_back(on_equator(0.1 * k));
  auto arcs = equator_arcs({path});
  REQUIRE(arcs.size() == 1);
  CHECK(arcs[0].lo == doctest::Approx(0.1));
  CHECK(arcs[0].hi == doctest::Approx(1.0));
  CHECK(arcs[0].lo_to_axis == doctest::Approx(0.1));

  // Separate curves merge only within the gap.
  arcs = equator_arcs({{on_equator(0.1)}, {on_equator(0.14)}, {on_equator(0.3)}});
  REQUIRE(arcs.size() == 2);
  CHECK(arcs[0].hi == doctest::Approx(0.14));

  // A curve through -e1 wraps.
  arcs = equator_arcs({{on_equator(3.0), on_equator(3.1), on_equator(-3.1), on_equator(-3.0)}});
  REQUIRE(arcs.size() == 1);
  CHECK(arcs[0].lo == doctest::Approx(3.0));
  CHECK(arcs[0].hi == doctest::Approx(2 * kPi - 3.0));
  CHECK(arcs[0].hi_to_axis == doctest::Approx(kPi - 3.0));

  arcs = equator_arcs({{on_equator(-3.12)}, {on_equator(3.13)}});
  REQUIRE(arcs.size() == 1);
  CHECK(arcs[0].length() == doctest::Approx(2 * kPi - 6.25));

  std::vector<Vec3> loop;
  for (int k = 0; k <= 40; ++k) loop.push_back(on_equator(0.2 * k));
  arcs = equator_arcs({loop});
  REQUIRE(arcs.size() == 1);
  CHECK(arcs[0].length() == doctest::Approx(2 * kPi));

  CHECK(equator_arcs({{Vec3::UnitZ()}}).empty());
  std::ostringstream svg;
  write_equator_svg(svg, equator_arcs({path}));
  CHECK(svg.str().find("<polyline") != std::string::npos);
}

TEST_CASE("normal preimages") {
  GrimReaperParams gp;
  gp.h = 0.1;
  gp.z_cap = 8;
  const TriMeshd gr = differential_quantities(grim_reaper(gp));
  CHECK(normal_preimage_count(gr, Vec3::UnitY()) == 0);

  const TriMeshd sphere = differential_quantities(fixtures::icosphere(1, 3));
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> phi(-kPi, kPi);
  for (int k = 0; k < 20; ++k) {
    const double p = phi(rng);
    if (std::abs(std::remainder(p, kPi)) < 0.05) continue;
    CHECK(normal_preimage_count(sphere, on_equator(p)) == 1);
  }
  CHECK_THROWS_AS(normal_preimage_count(sphere, on_equator(0.02)), RadoError);
  CHECK_THROWS_AS(normal_preimage_count(sphere, on_equator(kPi - 0.02)), RadoError);
  CHECK_THROWS_AS(normal_preimage_count(sphere, Vec3(0, 1, 0.1)), RadoError);
}

TEST_CASE("tangent plane splits") {
  const TriMeshd sphere = fixtures::icosphere(1, 4);
  const TangentSplit s = tangent_plane_components(sphere, Vec3(1, 0, 0), Vec3(1, 0, 0));
  CHECK(s.total == 1);
  CHECK(s.negative == 1);

  const TriMeshd plane = vertical_plane(0, 5, 5, 0.25);
  CHECK(tangent_plane_components(plane, Vec3(0, 0, 0), Vec3(1, 0, 0)).total == 0);
  CHECK_THROWS_AS(tangent_plane_components(plane, Vec3(0, 4.9, 0), Vec3(1, 0, 0)), RadoError);
  CHECK_THROWS_AS(tangent_plane_components(plane, Vec3(0, 0, 0), Vec3(0, 0, 1)), RadoError);
}

TEST_CASE("doubled pitchfork: one critical point of f_e2 on the axis") {
  const DoubledSurface& d = fixtures::doubled_pitchfork();
  const double h = fixtures::pitchfork_piece_fixture().field.h;
  const RadoReport r = rado_critical_points(d.mesh, Vec3::UnitY());
  CHECK(r.N == 1);
  REQUIRE(r.critical.size() == 1);
  const Vec3 p = d.mesh.point(r.critical[0].vertex);
  CHECK(axis_distance(p) <= 2 * h);
  MESSAGE("critical vertex at " << p.transpose());
  CHECK(rado_critical_points(d.mesh, -Vec3::UnitY()).N == 1);
}

TEST_CASE("doubled pitchfork: zero set of H is the axis") {
  const DoubledSurface& d = fixtures::doubled_pitchfork();
  const double h = fixtures::pitchfork_piece_fixture().field.h;
  const HSet hs = h_zero_set(d.mesh, HSource::translator);
  REQUIRE(hs.lines.size() == 1);
  CHECK(hs.lines[0].ends_on_boundary(d.mesh));
  double out = 0, in = 0;
  for (const Vec3& p : hs.lines[0].pts) out = std::max(out, axis_distance(p));
  for (int v : d.axis) {
    double best = std::numeric_limits<double>::infinity();
    for (const Vec3& p : hs.lines[0].pts) best = std::min(best, (p - d.mesh.point(v)).norm());
    in = std::max(in, best);
  }
  CHECK(std::max(out, in) <= 2 * h);

  const auto arcs = gauss_equator_image(hs);
  REQUIRE(arcs.size() == 1);
  CHECK(arcs[0].lo >= -0.1);
  CHECK(arcs[0].hi <= kPi + 0.1);
  CHECK(arcs[0].lo_to_axis <= 0.1);
  CHECK(arcs[0].hi_to_axis <= 0.1);
}

// The cotangent H is dominated by discretization error on the steep strip
// next to the axis, so its zero set picks up spurious curves.
TEST_CASE("doubled pitchfork: cotangent H zero set is the axis" * doctest::should_fail()) {
  const DoubledSurface& d = fixtures::doubled_pitchfork();
  const double h = fixtures::pitchfork_piece_fixture().field.h;
  const HSet hs = h_zero_set(d.mesh);
  MESSAGE("cotangent zero set: " << hs.lines.size() << " curves");
  REQUIRE(hs.lines.size() == 1);
  for (const Vec3& p : hs.lines[0].pts) CHECK(axis_distance(p) <= 2 * h);
}

TEST_CASE("doubled pitchfork: normal preimages and tangent plane") {
  const DoubledSurface& d = fixtures::doubled_pitchfork();
  CHECK(normal_preimage_count(d.mesh, Vec3::UnitY()) == 1);
  CHECK(normal_preimage_count(d.mesh, -Vec3::UnitY()) == 0);
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> phi(0.05, kPi - 0.05);
  std::bernoulli_distribution lower(0.5);
  for (int k = 0; k < 50; ++k) {
    const double p = lower(rng) ? -phi(rng) : phi(rng);
    CHECK(normal_preimage_count(d.mesh, on_equator(p)) <= 1);
  }

  const HSet hs = h_zero_set(d.mesh, HSource::translator);
  REQUIRE(!hs.lines.empty());
  const HPolyline& l = hs.lines[0];
  double zlo = 1e300, zhi = -1e300;
  for (const Vec3& p : l.pts) zlo = std::min(zlo, p.z()), zhi = std::max(zhi, p.z());
  std::size_t mid = 0;
  for (std::size_t k = 0; k < l.pts.size(); ++k)
    if (std::abs(l.pts[k].z() - (zlo + zhi) / 2) < std::abs(l.pts[mid].z() - (zlo + zhi) / 2)) mid = k;
  const TangentSplit t = tangent_plane_components(d.mesh, l.pts[mid], l.normals[mid]);
  CHECK(t.total == 4);
  CHECK(t.positive == 2);
  CHECK(t.negative == 2);
}
