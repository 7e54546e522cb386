#include "tslab/wings.hpp"

#include "tslab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace tslab {

std::string to_string(WingType t) { return t == WingType::planar ? "planar" : "grim_reaper"; }

WingType classify_wing(const Polyline& line) {
  const Exit a = line.start, b = line.end;
  auto bad = [](Exit e) { return e == Exit::side || e == Exit::closed; };
  if (bad(a) || bad(b))
    throw WingError("classify_wing: unclassifiable ends " + to_string(a) + "/" + to_string(b));
  if (a == Exit::top && b == Exit::top) return WingType::grim_reaper;
  if (a == Exit::bottom && b == Exit::bottom)
    throw WingError("classify_wing: BOTTOM/BOTTOM slice (not a translator wing or a truncation artifact)");
  return WingType::planar;
}

namespace {

std::string trace_text(const std::vector<CensusRow>& rows) {
  std::ostringstream s;
  s << "t:mu";
  for (const CensusRow& r : rows) s << ' ' << r.t << ':' << r.mu;
  return s.str();
}

WingCount classify_slice(const SliceSet& s, int omega, std::vector<std::string>& flags, const char* side) {
  WingCount c;
  c.omega = omega;
  c.slice_components = int(s.lines.size());
  for (const Polyline& l : s.lines) {
    try {
      (classify_wing(l) == WingType::planar ? c.omega_P : c.omega_G)++;
    } catch (const WingError& e) {
      ++c.unclassified;
      flags.push_back(std::string(side) + " side at y = " + std::to_string(s.t) + ": " + e.what());
    }
  }
  return c;
}

Vec3 face_normal(const TriMeshd& m, int f) {
  const auto& F = m.faces();
  const Vec3 a = m.point(F(f, 0)), b = m.point(F(f, 1)), c = m.point(F(f, 2));
  return (b - a).cross(c - a).normalized();
}

}  // namespace

WingReport wing_census(const TriMeshd& mesh, double t_min, double t_max, double step) {
  if (!(step > 0)) throw WingError("wing_census: step must be positive");
  const Eigen::VectorXd y = mesh.vertices().col(1);
  const double h = mesh.median_edge_length();
  const double reach_plus = y.maxCoeff() - 2 * h, reach_minus = -y.minCoeff() - 2 * h;

  WingReport rep;
  std::vector<double> ts;
  for (int k = 0;; ++k) {
    const double t = t_min + k * step;
    if (t > t_max + 1e-12 * std::abs(t_max)) break;
    ts.push_back(t);
  }

  struct Side {
    int sign;
    std::vector<double> t;
    std::vector<int> mu, slices;
    double t_stable = 0;
    int omega = 0;
  };
  Side sides[2] = {{-1, {}, {}, {}}, {1, {}, {}, {}}};
  for (Side& s : sides) {
    const double reach = s.sign > 0 ? reach_plus : reach_minus;
    for (double t : ts)
      if (t < reach) s.t.push_back(t);
    s.mu.resize(s.t.size());
    s.slices.resize(s.t.size());
    parallel_for(s.t.size(), [&](std::size_t b, std::size_t e) {
      for (std::size_t k = b; k < e; ++k) {
        s.mu[k] = count_components_above(mesh, Vec3(0, s.sign, 0), s.t[k]);
        s.slices[k] = int(slice_y(mesh, s.sign * s.t[k]).lines.size());
      }
    });
  }
  for (const Side& s : sides)
    for (std::size_t k = 0; k < s.t.size(); ++k) rep.trace.push_back({s.sign * s.t[k], s.mu[k], s.slices[k]});

  for (Side& s : sides) {
    const char* name = s.sign > 0 ? "+" : "-";
    if (s.t.size() < 5)
      throw WingError(std::string("wing_census: fewer than 5 offsets on the ") + name + " side inside the mesh; " +
                      trace_text(rep.trace));
    std::size_t k = s.mu.size() - 1;
    while (k > 0 && s.mu[k - 1] == s.mu.back()) --k;
    if (s.mu.size() - k < 3)
      throw WingError(std::string("wing_census: no stabilization on the ") + name + " side; " + trace_text(rep.trace));
    s.t_stable = s.t[k];
    s.omega = s.mu.back();
    for (std::size_t j = 1; j < s.mu.size(); ++j)
      if (s.mu[j] < s.mu[j - 1]) {
        rep.monotone = false;
        rep.flags.push_back(std::string("mu decreases on the ") + name + " side at t = " + std::to_string(s.t[j]));
      }
  }

  rep.t_stable = std::max(sides[0].t_stable, sides[1].t_stable);
  rep.minus = classify_slice(slice_y(mesh, -rep.t_stable), sides[0].omega, rep.flags, "-");
  rep.plus = classify_slice(slice_y(mesh, rep.t_stable), sides[1].omega, rep.flags, "+");
  for (const WingCount* c : {&rep.minus, &rep.plus}) {
    if (c->slice_components != c->omega) rep.slices_match = false;
    if (c->omega_P + c->omega_G != c->omega)
      rep.flags.push_back("wing types " + std::to_string(c->omega_P) + " + " + std::to_string(c->omega_G) +
                          " do not add up to omega = " + std::to_string(c->omega));
  }
  if (!rep.slices_match) rep.flags.push_back("slice components at t_stable differ from the component count");
  return rep;
}

LambdaVerdict lambda_from_wings(const WingReport& r) {
  LambdaVerdict v;
  v.lambda_plus = r.plus.lambda();
  v.lambda_minus = r.minus.lambda();
  v.lambda = v.lambda_plus;
  auto fail = [&](const std::string& what) {
    v.consistent = false;
    v.failures.push_back(what);
  };
  if (v.lambda_plus != v.lambda_minus) fail("lambda+ != lambda-");
  if (r.plus.omega_P != r.minus.omega_P) fail("omega_P+ != omega_P-");
  if (r.plus.omega_G != r.minus.omega_G) fail("omega_G+ != omega_G-");
  if ((r.plus.omega + r.minus.omega) % 2 != 0) fail("total wing count is odd");
  return v;
}

HorizontalProfile horizontal_slice_profile(const TriMeshd& mesh, double z, double h) {
  if (!(h > 0)) h = mesh.median_edge_length();
  const SliceSet s = slice_z(mesh, z);
  HorizontalProfile p;
  p.z = s.t;
  for (const Polyline& l : s.lines) p.component_x.push_back(l.mean().x());
  std::sort(p.component_x.begin(), p.component_x.end());
  std::vector<std::vector<double>> groups;
  for (double x : p.component_x) {
    if (groups.empty() || x - groups.back().back() > 4 * h) groups.emplace_back();
    groups.back().push_back(x);
  }
  for (const auto& g : groups) {
    double m = 0;
    for (double x : g) m += x;
    p.clusters.push_back({m / double(g.size()), int(g.size())});
  }
  return p;
}

SpineCheck wing_spine(const TriMeshd& mesh, const std::vector<double>& ts, double x_hint, int lines, unsigned seed) {
  SpineCheck out;
  const double h = mesh.median_edge_length();
  std::vector<Polyline> wings;
  for (double t : ts) {
    const SliceSet s = slice_y(mesh, t);
    const Polyline* best = nullptr;
    for (const Polyline& l : s.lines)
      if (l.start == Exit::top && l.end == Exit::top &&
          (!best || std::abs(l.mean().x() - x_hint) < std::abs(best->mean().x() - x_hint)))
        best = &l;
    if (!best || best->pts.size() < 3) {
      ++out.split_bad;
      continue;
    }
    const Polyline& w = *best;
    wings.push_back(w);

    std::size_t k = 0;
    for (std::size_t j = 1; j < w.pts.size(); ++j)
      if (w.pts[j].y() < w.pts[k].y()) k = j;
    // Least-squares parabola through the points within 3h in x of the lowest one,
    // and a length-weighted least-squares line through the segment normals there.
    const double x0 = w.pts[k].x();
    std::size_t lo = k, hi = k;
    while (lo > 0 && std::abs(w.pts[lo - 1].x() - x0) <= 3 * h) --lo;
    while (hi + 1 < w.pts.size() && std::abs(w.pts[hi + 1].x() - x0) <= 3 * h) ++hi;
    double xs = x0, zs = w.pts[k].y();
    if (hi - lo >= 2) {
      Eigen::MatrixXd A(hi - lo + 1, 3);
      Eigen::VectorXd z(hi - lo + 1);
      for (std::size_t j = lo; j <= hi; ++j) {
        const double d = w.pts[j].x() - x0;
        A.row(Eigen::Index(j - lo)) << 1, d, d * d;
        z(Eigen::Index(j - lo)) = w.pts[j].y();
      }
      const Eigen::Vector3d c = A.colPivHouseholderQr().solve(z);
      if (c(2) > 0) {
        const double dl = std::min(w.pts[lo].x(), w.pts[hi].x()) - x0, dh = std::max(w.pts[lo].x(), w.pts[hi].x()) - x0;
        const double dd = std::clamp(-c(1) / (2 * c(2)), dl, dh);
        xs = x0 + dd;
        zs = c(0) + c(1) * dd + c(2) * dd * dd;
      }
    }
    double nx;
    {
      const std::size_t s0 = lo, s1 = std::max(hi, lo + 1);
      Eigen::MatrixXd A(s1 - s0, 2);
      Eigen::VectorXd n(s1 - s0);
      for (std::size_t j = s0; j < s1 && j < w.faces.size(); ++j) {
        const double len = std::sqrt((w.pts[j + 1] - w.pts[j]).norm());
        A.row(Eigen::Index(j - s0)) << len, len * ((w.pts[j].x() + w.pts[j + 1].x()) / 2 - xs);
        n(Eigen::Index(j - s0)) = len * face_normal(mesh, w.faces[j]).x();
      }
      const Eigen::Index rows = Eigen::Index(std::min(s1, w.faces.size()) - s0);
      nx = rows >= 2 ? Eigen::Vector2d(A.topRows(rows).colPivHouseholderQr().solve(n.head(rows)))(0)
                     : face_normal(mesh, w.faces[std::min(k, w.faces.size() - 1)]).x();
    }
    out.spine.emplace_back(xs, s.t, zs);
    out.normal_x.push_back(nx);
    out.max_normal_x = std::max(out.max_normal_x, std::abs(nx));

    // Arcs left after removing the h-neighbourhood of the spine point.
    std::vector<std::vector<double>> arcs;
    bool in_arc = false;
    for (const auto& p : w.pts) {
      if (std::hypot(p.x() - xs, p.y() - zs) <= h) {
        in_arc = false;
        continue;
      }
      if (!in_arc) arcs.emplace_back();
      in_arc = true;
      arcs.back().push_back(p.x());
    }
    bool split_ok = arcs.size() == 2;
    for (const auto& arc : arcs) {
      if (arc.size() < 2) continue;
      const double sgn = arc.back() > arc.front() ? 1 : -1;
      for (std::size_t j = 1; j < arc.size(); ++j)
        if (sgn * (arc[j] - arc[j - 1]) <= 0) split_ok = false;
    }
    if (!split_ok) ++out.split_bad;
  }

  std::mt19937 rng(seed);
  for (int n = 0; n < lines && !wings.empty(); ++n) {
    const Polyline& w = wings[std::uniform_int_distribution<std::size_t>(0, wings.size() - 1)(rng)];
    double lo = 1e300, hi = -1e300;
    for (const auto& p : w.pts) lo = std::min(lo, p.y()), hi = std::max(hi, p.y());
    const double c = std::uniform_real_distribution<double>(lo, hi)(rng);
    int count = 0;
    for (std::size_t j = 0; j + 1 < w.pts.size(); ++j)
      if ((w.pts[j].y() - c) * (w.pts[j + 1].y() - c) < 0) ++count;
    ++out.lines_sampled;
    if (count != 0 && count != 2) ++out.lines_bad;
  }
  return out;
}

int skew_slice_components(const TriMeshd& mesh, double y0, double alpha) {
  return int(slice_skew(mesh, y0, alpha).lines.size());
}

}  // namespace tslab
