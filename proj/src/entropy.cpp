#include "tslab/entropy.hpp"

#include "tslab/parallel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <numbers>

namespace tslab {

namespace {

constexpr double kCutoff = 50;  // exp(-50) ~ 2e-22

double subdivided(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& x0, double s0, double limit2) {
  const double d2 = std::max({(a - b).squaredNorm(), (b - c).squaredNorm(), (c - a).squaredNorm()});
  if (d2 <= limit2) {
    const Vec3 g = (a + b + c) / 3;
    return triangle_area<double>(a, b, c) * std::exp(-(g - x0).squaredNorm() / (4 * s0));
  }
  const Vec3 ab = (a + b) / 2, bc = (b + c) / 2, ca = (c + a) / 2;
  return subdivided(a, ab, ca, x0, s0, limit2) + subdivided(ab, b, bc, x0, s0, limit2) +
         subdivided(ca, bc, c, x0, s0, limit2) + subdivided(ab, bc, ca, x0, s0, limit2);
}

}  // namespace

Eigen::AlignedBox3d bounding_box(const TriMeshd& mesh) {
  Eigen::AlignedBox3d box;
  for (Eigen::Index v = 0; v < mesh.num_vertices(); ++v) box.extend(mesh.point(v));
  return box;
}

GaussianDensity::GaussianDensity(const TriMeshd& mesh) {
  const auto& F = mesh.faces();
  const std::size_t n = std::size_t(F.rows());
  a_.resize(n), b_.resize(n), c_.resize(n), centroid_.resize(n), area_.resize(n), diam_.resize(n);
  for (std::size_t f = 0; f < n; ++f) {
    a_[f] = mesh.point(F(f, 0));
    b_[f] = mesh.point(F(f, 1));
    c_[f] = mesh.point(F(f, 2));
    centroid_[f] = (a_[f] + b_[f] + c_[f]) / 3;
    area_[f] = triangle_area<double>(a_[f], b_[f], c_[f]);
    diam_[f] = std::sqrt(std::max({(a_[f] - b_[f]).squaredNorm(), (b_[f] - c_[f]).squaredNorm(),
                                   (c_[f] - a_[f]).squaredNorm()}));
    max_diam_ = std::max(max_diam_, diam_[f]);
  }
  bounds_ = bounding_box(mesh);
  build_buckets();
}

void GaussianDensity::build_buckets() {
  const std::size_t n = area_.size();
  if (n == 0) return;

  // Uniform bucket grid over the centroids, about 8 faces per cell.
  const Vec3 ext = bounds_.sizes().cwiseMax(1e-9);
  const double vol = ext.prod();
  cell_ = std::max({std::cbrt(vol * 8 / double(n)), max_diam_, 1e-6});
  for (int k = 0; k < 3; ++k) dims_(k) = std::clamp(int(std::ceil(ext(k) / cell_)), 1, 1024);
  std::vector<int> cell_of(n);
  cell_start_.assign(std::size_t(dims_.prod()) + 1, 0);
  for (std::size_t f = 0; f < n; ++f) {
    Eigen::Vector3i q;
    for (int k = 0; k < 3; ++k)
      q(k) = std::clamp(int((centroid_[f](k) - bounds_.min()(k)) / cell_), 0, dims_(k) - 1);
    cell_of[f] = (q(2) * dims_(1) + q(1)) * dims_(0) + q(0);
    ++cell_start_[std::size_t(cell_of[f]) + 1];
  }
  for (std::size_t k = 1; k < cell_start_.size(); ++k) cell_start_[k] += cell_start_[k - 1];
  cell_faces_.resize(n);
  std::vector<int> fill(cell_start_.begin(), cell_start_.end() - 1);
  for (std::size_t f = 0; f < n; ++f) cell_faces_[std::size_t(fill[std::size_t(cell_of[f])]++)] = int(f);
}

GaussianDensity GaussianDensity::coarsened(double s0) const {
  const double c = (std::sqrt(s0) / 4 - max_diam_) / std::sqrt(3.0);
  if (lumped_ || area_.empty() || !(c > 0)) return *this;
  const Vec3 ext = bounds_.sizes();
  const double cells = (ext / c).array().floor().cwiseMax(0).matrix().prod() + 1;
  if (cells > 64 * double(area_.size())) return *this;

  std::vector<std::pair<std::array<long, 3>, int>> key(area_.size());
  for (std::size_t f = 0; f < area_.size(); ++f) {
    std::array<long, 3> q;
    for (int k = 0; k < 3; ++k) q[std::size_t(k)] = long(std::floor((centroid_[f](k) - bounds_.min()(k)) / c));
    key[f] = {q, int(f)};
  }
  std::sort(key.begin(), key.end());

  GaussianDensity out;
  out.lumped_ = true;
  out.bounds_ = bounds_;
  for (std::size_t b = 0; b < key.size();) {
    std::size_t e = b;
    double area = 0;
    Vec3 m = Vec3::Zero();
    while (e < key.size() && key[e].first == key[b].first) {
      const std::size_t f = std::size_t(key[e].second);
      area += area_[f];
      m += area_[f] * centroid_[f];
      ++e;
    }
    if (area > 0) {
      m /= area;
      double r = 0;
      for (std::size_t k = b; k < e; ++k) {
        const std::size_t f = std::size_t(key[k].second);
        r = std::max(r, (centroid_[f] - m).norm() + diam_[f]);
      }
      out.centroid_.push_back(m);
      out.area_.push_back(area);
      out.diam_.push_back(r);
      out.max_diam_ = std::max(out.max_diam_, r);
    }
    b = e;
  }
  out.build_buckets();
  return out;
}

std::vector<int> GaussianDensity::candidates(const Vec3& x0, double radius) const {
  std::vector<int> out;
  if (area_.empty()) return out;
  Eigen::Vector3i lo, hi;
  for (int k = 0; k < 3; ++k) {
    lo(k) = std::clamp(int(std::floor((x0(k) - radius - bounds_.min()(k)) / cell_)), 0, dims_(k) - 1);
    hi(k) = std::clamp(int(std::floor((x0(k) + radius - bounds_.min()(k)) / cell_)), 0, dims_(k) - 1);
    if (x0(k) + radius < bounds_.min()(k) - cell_ || x0(k) - radius > bounds_.max()(k) + cell_) return out;
  }
  for (int z = lo(2); z <= hi(2); ++z)
    for (int y = lo(1); y <= hi(1); ++y)
      for (int x = lo(0); x <= hi(0); ++x) {
        const std::size_t cell = std::size_t((z * dims_(1) + y) * dims_(0) + x);
        for (int k = cell_start_[cell]; k < cell_start_[cell + 1]; ++k) out.push_back(cell_faces_[std::size_t(k)]);
      }
  std::sort(out.begin(), out.end());
  return out;
}

double GaussianDensity::face_term(int f, const Vec3& x0, double s0) const {
  const double reach = std::max(0.0, (centroid_[std::size_t(f)] - x0).norm() - diam_[std::size_t(f)]);
  if (reach * reach > 4 * s0 * kCutoff) return 0;
  const double limit = std::sqrt(s0) / 4;
  if (lumped_ || diam_[std::size_t(f)] <= limit)
    return area_[std::size_t(f)] * std::exp(-(centroid_[std::size_t(f)] - x0).squaredNorm() / (4 * s0));
  return subdivided(a_[std::size_t(f)], b_[std::size_t(f)], c_[std::size_t(f)], x0, s0, limit * limit);
}

double GaussianDensity::operator()(const Vec3& x0, double s0, bool parallel) const {
  if (!(s0 > 0)) throw EntropyError("F: s0 must be positive");
  const std::vector<int> faces = candidates(x0, std::sqrt(4 * s0 * kCutoff) + max_diam_);
  std::vector<double> terms(faces.size());
  auto body = [&](std::size_t b, std::size_t e) {
    for (std::size_t k = b; k < e; ++k) terms[k] = face_term(faces[k], x0, s0);
  };
  if (parallel)
    parallel_for(faces.size(), body);
  else
    body(0, faces.size());
  return pairwise_sum(terms.data(), terms.size()) / (4 * std::numbers::pi * s0);
}

double f_functional(const TriMeshd& mesh, const Vec3& x0, double s0) { return GaussianDensity(mesh)(x0, s0); }

namespace {

using P4 = Eigen::Vector4d;  // x, y, z, log s0

/// Nelder-Mead maximization with standard coefficients.
P4 nelder_mead(const std::function<double(const P4&)>& f, P4 start, const P4& step, int max_iter, double tol,
               long& evals) {
  std::array<P4, 5> x;
  std::array<double, 5> v;
  x[0] = start;
  for (int k = 0; k < 4; ++k) {
    x[k + 1] = start;
    x[k + 1](k) += step(k);
  }
  for (int k = 0; k < 5; ++k) v[k] = f(x[k]), ++evals;
  for (int it = 0; it < max_iter; ++it) {
    std::array<int, 5> order{0, 1, 2, 3, 4};
    std::sort(order.begin(), order.end(), [&](int a, int b) { return v[a] > v[b]; });
    std::array<P4, 5> xs;
    std::array<double, 5> vs;
    for (int k = 0; k < 5; ++k) xs[k] = x[order[k]], vs[k] = v[order[k]];
    x = xs, v = vs;
    if (v[0] - v[4] <= tol * (1 + std::abs(v[0]))) break;
    P4 centroid = P4::Zero();
    for (int k = 0; k < 4; ++k) centroid += x[k] / 4;
    const P4 xr = centroid + (centroid - x[4]);
    const double vr = f(xr);
    ++evals;
    if (vr > v[0]) {
      const P4 xe = centroid + 2 * (centroid - x[4]);
      const double ve = f(xe);
      ++evals;
      if (ve > vr) x[4] = xe, v[4] = ve;
      else x[4] = xr, v[4] = vr;
    } else if (vr > v[3]) {
      x[4] = xr, v[4] = vr;
    } else {
      const bool outside = vr > v[4];
      const P4 xc = outside ? P4(centroid + 0.5 * (xr - centroid)) : P4(centroid + 0.5 * (x[4] - centroid));
      const double vc = f(xc);
      ++evals;
      if (vc > (outside ? vr : v[4])) {
        x[4] = xc, v[4] = vc;
      } else {
        for (int k = 1; k < 5; ++k) {
          x[k] = x[0] + 0.5 * (x[k] - x[0]);
          v[k] = f(x[k]);
          ++evals;
        }
      }
    }
  }
  int best = 0;
  for (int k = 1; k < 5; ++k)
    if (v[k] > v[best]) best = k;
  return x[best];
}

}  // namespace

EntropyResult entropy_sup(const TriMeshd& mesh, const SearchOptions& opt, std::vector<EntropyProbe>* trace) {
  if (!(opt.s_min > 0) || !(opt.s_max >= opt.s_min)) throw EntropyError("entropy_sup: bad s0 range");
  if (opt.grid < 1 || opt.scales < 1) throw EntropyError("entropy_sup: empty search grid");
  const GaussianDensity F(mesh);
  const Eigen::AlignedBox3d mbox = F.bounds();
  Eigen::AlignedBox3d box = opt.box;
  if (box.isEmpty()) {
    const Vec3 pad = Vec3::Constant(std::sqrt(opt.s_max));
    box = Eigen::AlignedBox3d(mbox.min() - pad, mbox.max() + pad);
  } else if (!box.contains(mbox)) {
    throw EntropyError("entropy_sup: search box does not contain the mesh bounding box");
  }

  std::vector<double> scales(std::size_t(opt.scales));
  for (int k = 0; k < opt.scales; ++k)
    scales[std::size_t(k)] =
        opt.scales == 1 ? opt.s_min : opt.s_min * std::pow(opt.s_max / opt.s_min, double(k) / (opt.scales - 1));
  auto coord = [&](int axis, int k) {
    return opt.grid == 1 ? box.center()(axis)
                         : box.min()(axis) + box.sizes()(axis) * double(k) / double(opt.grid - 1);
  };

  const std::size_t g = std::size_t(opt.grid), n = std::size_t(opt.scales) * g * g * g;
  std::vector<EntropyProbe> probes(n);
  for (std::size_t s = 0; s < scales.size(); ++s) {
    const GaussianDensity coarse = F.coarsened(scales[s]);
    parallel_for(g * g * g, [&](std::size_t b, std::size_t e) {
      for (std::size_t r = b; r < e; ++r) {
        const Vec3 x(coord(0, int(r / (g * g))), coord(1, int(r / g % g)), coord(2, int(r % g)));
        probes[s * g * g * g + r] = {x, scales[s], coarse(x, scales[s], false), true};
      }
    });
  }

  EntropyResult res;
  res.evaluations = long(n);
  if (trace) *trace = probes;

  std::vector<std::size_t> order(n);
  for (std::size_t k = 0; k < n; ++k) order[k] = k;
  const std::size_t nref = std::min(n, std::size_t(std::max(1, opt.refine)));
  std::partial_sort(order.begin(), order.begin() + long(nref), order.end(), [&](std::size_t a, std::size_t b) {
    return probes[a].F > probes[b].F || (probes[a].F == probes[b].F && a < b);
  });
  order.resize(nref);
  std::sort(order.begin(), order.end());
  std::size_t best = order[0];
  double best_F = -1;
  for (std::size_t k : order) {
    const double v = F(probes[k].x0, probes[k].s0);
    ++res.evaluations;
    if (trace) trace->push_back({probes[k].x0, probes[k].s0, v});
    if (v > best_F * (1 + 1e-12)) best = k, best_F = v;
  }

  const P4 start(probes[best].x0(0), probes[best].x0(1), probes[best].x0(2), std::log(probes[best].s0));
  const double dlog = opt.scales > 1 ? std::log(opt.s_max / opt.s_min) / (opt.scales - 1) : 1.0;
  P4 step;
  for (int k = 0; k < 3; ++k) step(k) = opt.grid > 1 ? 0.5 * box.sizes()(k) / (opt.grid - 1) : 1.0;
  step(3) = 0.5 * dlog;
  const double lo_s = std::log(opt.s_min), hi_s = std::log(opt.s_max);
  auto objective = [&](const P4& p) {
    const Vec3 x = p.head<3>().cwiseMax(box.min()).cwiseMin(box.max());
    const double s = std::exp(std::clamp(p(3), lo_s, hi_s));
    const double v = F(x, s);
    if (trace) trace->push_back({x, s, v});
    return v;
  };
  const P4 top = nelder_mead(objective, start, step, opt.max_simplex_iter, opt.simplex_tol, res.evaluations);
  res.x0 = top.head<3>().cwiseMax(box.min()).cwiseMin(box.max());
  res.s0 = std::exp(std::clamp(top(3), lo_s, hi_s));
  res.F = F(res.x0, res.s0);
  ++res.evaluations;
  if (res.F < best_F) {
    res.x0 = probes[best].x0;
    res.s0 = probes[best].s0;
    res.F = best_F;
  }
  res.truncation_radius = truncation_radius(mesh, res.x0);
  res.tail_bound = res.truncation_radius > 4 * std::sqrt(res.s0)
                       ? tail_bound(mesh, res.truncation_radius, res.x0, res.s0)
                       : std::numeric_limits<double>::infinity();
  return res;
}

double max_rescale_time(const TriMeshd& mesh) { return bounding_box(mesh).max()(2) / 2; }

double rescaled_f(const TriMeshd& mesh, double t) {
  if (!(t > 0)) throw EntropyError("rescaled_f: t must be positive");
  const double top = bounding_box(mesh).max()(2);
  if (top < 2 * t)
    throw EntropyError("rescaled_f: mesh reaches z = " + std::to_string(top) + ", needs z >= 2t = " +
                       std::to_string(2 * t));
  return f_functional(mesh, Vec3(0, 0, t), t);
}

double truncation_radius(const TriMeshd& mesh, const Vec3& x0) {
  double r = std::numeric_limits<double>::infinity();
  for (Eigen::Index v = 0; v < mesh.num_vertices(); ++v)
    if (mesh.is_boundary(v)) r = std::min(r, (mesh.point(v) - x0).norm());
  return r;
}

double tail_bound(const TriMeshd& mesh, double R, const Vec3& x0, double s0) {
  if (!(s0 > 0)) throw EntropyError("tail_bound: s0 must be positive");
  if (!(R > 4 * std::sqrt(s0))) throw EntropyError("tail_bound: R must exceed 4 sqrt(s0)");
  if (std::isinf(R)) return 0;
  const int shells = std::max(1, int(std::floor(R)));
  std::vector<double> area(std::size_t(shells), 0.0);
  const auto& F = mesh.faces();
  for (Eigen::Index f = 0; f < F.rows(); ++f) {
    const Vec3 a = mesh.point(F(f, 0)), b = mesh.point(F(f, 1)), c = mesh.point(F(f, 2));
    const int k = int(std::floor(((a + b + c) / 3 - x0).norm()));
    if (k < shells) area[std::size_t(k)] += triangle_area<double>(a, b, c);
  }
  double C = 0;
  for (int k = 0; k < shells; ++k) C = std::max(C, area[std::size_t(k)] / double(2 * k + 1));
  double sum = 0;
  for (int k = 0;; ++k) {
    const double r0 = R + k;
    const double term = C * (2 * r0 + 1) * std::exp(-r0 * r0 / (4 * s0)) / (4 * std::numbers::pi * s0);
    sum += term;
    if (term < 1e-18 * std::max(sum, 1e-300) || k > 100000) break;
  }
  return sum;
}

}  // namespace tslab
