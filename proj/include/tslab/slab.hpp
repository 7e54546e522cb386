#pragma once

#include "tslab/mesh.hpp"

#include <numbers>

namespace tslab {

template <typename Scalar>
struct SlabFit {
  Vector3<Scalar> normal;  // horizontal unit vector (cos phi, sin phi, 0)
  Scalar phi = 0;          // in [0, pi)
  Scalar offset = 0;       // center of the extent along normal
  Scalar width = 0;        // full extent, 2w
};

/// Convex hull of planar points (monotone chain), counter-clockwise.
template <typename Scalar>
std::vector<Eigen::Matrix<Scalar, 2, 1>> convex_hull_2d(std::vector<Eigen::Matrix<Scalar, 2, 1>> pts) {
  using P = Eigen::Matrix<Scalar, 2, 1>;
  std::sort(pts.begin(), pts.end(), [](const P& a, const P& b) { return a(0) < b(0) || (a(0) == b(0) && a(1) < b(1)); });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  auto cross = [](const P& o, const P& a, const P& b) {
    return (a(0) - o(0)) * (b(1) - o(1)) - (a(1) - o(1)) * (b(0) - o(0));
  };
  std::vector<P> h(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  return h;
}

/// Extent of the mesh along xi(phi); scanned at 0.001 rad over [0, pi), then
/// refined by golden-section search inside the best bracket.
template <typename Scalar>
SlabFit<Scalar> fit_slab(const TriMesh<Scalar>& m) {
  using P = Eigen::Matrix<Scalar, 2, 1>;
  if (m.num_vertices() == 0) throw MeshError("fit_slab: empty mesh");
  std::vector<P> pts(m.num_vertices());
  for (Eigen::Index v = 0; v < m.num_vertices(); ++v) pts[v] = m.vertices().row(v).template head<2>().transpose();
  const std::vector<P> hull = convex_hull_2d(std::move(pts));

  auto extent = [&](Scalar phi, Scalar* lo_out = nullptr) {
    const P xi(std::cos(phi), std::sin(phi));
    Scalar lo = std::numeric_limits<Scalar>::infinity(), hi = -lo;
    for (const P& p : hull) {
      const Scalar s = p.dot(xi);
      lo = std::min(lo, s);
      hi = std::max(hi, s);
    }
    if (lo_out) *lo_out = lo;
    return hi - lo;
  };

  const Scalar pi = std::numbers::pi_v<Scalar>;
  const Scalar step = Scalar(0.001);
  const int n = int(std::ceil(pi / step));
  int best_k = 0;
  Scalar best = extent(Scalar(0));
  for (int k = 1; k < n; ++k) {
    const Scalar w = extent(k * step);
    if (w < best) {
      best = w;
      best_k = k;
    }
  }

  Scalar a = best_k * step - step, b = best_k * step + step;
  const Scalar g = (std::sqrt(Scalar(5)) - 1) / 2;
  Scalar c = b - g * (b - a), d = a + g * (b - a);
  Scalar fc = extent(c), fd = extent(d);
  for (int it = 0; it < 80 && (b - a) > Scalar(1e-13); ++it) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = extent(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = extent(d);
    }
  }
  Scalar phi = (a + b) / 2;
  if (extent(phi) > best) phi = best_k * step;  // refinement never worsens the scan
  phi = std::fmod(phi, pi);
  if (phi < 0) phi += pi;

  SlabFit<Scalar> fit;
  Scalar lo;
  fit.phi = phi;
  fit.width = extent(phi, &lo);
  fit.offset = lo + fit.width / 2;
  fit.normal = Vector3<Scalar>(std::cos(phi), std::sin(phi), 0);
  return fit;
}

}  // namespace tslab
