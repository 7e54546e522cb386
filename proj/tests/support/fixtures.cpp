#include "fixtures.hpp"

#include "tslab/differential.hpp"

#include <array>
#include <cmath>
#include <map>
#include <numbers>

namespace tslab::fixtures {

TriMeshd icosphere(double radius, int levels) {
  const double t = (1 + std::sqrt(5.0)) / 2;
  std::vector<Vec3> P = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                         {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  std::vector<std::array<int, 3>> F = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                                       {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                                       {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                                       {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (auto& p : P) p.normalize();
  for (int l = 0; l < levels; ++l) {
    std::map<std::pair<int, int>, int> mid;
    auto midpoint = [&](int a, int b) {
      auto key = std::minmax(a, b);
      auto it = mid.find(key);
      if (it != mid.end()) return it->second;
      P.push_back((P[a] + P[b]).normalized());
      return mid[key] = int(P.size()) - 1;
    };
    std::vector<std::array<int, 3>> G;
    for (auto& f : F) {
      const int a = midpoint(f[0], f[1]), b = midpoint(f[1], f[2]), c = midpoint(f[2], f[0]);
      G.push_back({f[0], a, c});
      G.push_back({f[1], b, a});
      G.push_back({f[2], c, b});
      G.push_back({a, b, c});
    }
    F.swap(G);
  }
  VertexMatrix<double> V(P.size(), 3);
  for (std::size_t i = 0; i < P.size(); ++i) V.row(i) = radius * P[i].transpose();
  FaceMatrix M(F.size(), 3);
  for (std::size_t i = 0; i < F.size(); ++i) M.row(i) << F[i][0], F[i][1], F[i][2];
  return TriMeshd(std::move(V), std::move(M));
}

TriMeshd graph_mesh(const std::function<double(double, double)>& f, double x0, double x1, double y0, double y1,
                    double h) {
  const int nx = int(std::lround((x1 - x0) / h)) + 1, ny = int(std::lround((y1 - y0) / h)) + 1;
  VertexMatrix<double> V(nx * ny, 3);
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) {
      const double x = x0 + (x1 - x0) * i / (nx - 1), y = y0 + (y1 - y0) * j / (ny - 1);
      V.row(i * ny + j) << x, y, f(x, y);
    }
  return grid_mesh(V, nx, ny);
}

TriMeshd annulus(double r0, double r1, int nr, int nt) {
  VertexMatrix<double> V(nr * nt, 3);
  for (int i = 0; i < nr; ++i)
    for (int j = 0; j < nt; ++j) {
      const double r = r0 + (r1 - r0) * i / (nr - 1), t = 2 * std::numbers::pi * j / nt;
      V.row(i * nt + j) << r * std::cos(t), r * std::sin(t), 0;
    }
  return grid_mesh(V, nr, nt, true);
}

const CappedSolve& pitchfork_piece_fixture() {
  static const CappedSolve s = pitchfork_piece(std::numbers::pi, 6 * std::numbers::pi, 0.1);
  return s;
}

const DoubledSurface& doubled_pitchfork() {
  static const DoubledSurface d = [] {
    const CappedSolve& s = pitchfork_piece_fixture();
    DoubledSurface out = reflect_double(s.field, s.ramp_halfwidth);
    out.mesh = differential_quantities(out.mesh);
    return out;
  }();
  return d;
}

}  // namespace tslab::fixtures
