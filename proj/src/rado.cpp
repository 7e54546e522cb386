#include "tslab/rado.hpp"

#include "tslab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <ostream>
#include <sstream>

namespace tslab {

namespace {

constexpr double kPi = std::numbers::pi;

// Sign of <w - v, nu + eps t1 + eps^2 t2> as eps -> 0: 0 on an exact tie,
// otherwise +-1, with *broke set when nu alone was not decisive.
int link_sign(const Vec3& e, const Vec3 (&dir)[3], bool* broke) {
  const double tol = 1e-14 * e.norm();
  for (int k = 0; k < 3; ++k) {
    const double d = e.dot(dir[k]);
    if (std::abs(d) > tol) {
      if (k > 0) *broke = true;
      return d > 0 ? 1 : -1;
    }
  }
  return 0;
}

// Sign changes around the cyclic ring; -1 on a tie.
int alternations(const TriMeshd& mesh, int v, const std::vector<int>& ring, const Vec3 (&dir)[3], bool* broke) {
  const Vec3 p = mesh.point(v);
  int prev = link_sign(mesh.point(ring.back()) - p, dir, broke), changes = 0;
  if (!prev) return -1;
  for (int w : ring) {
    const int s = link_sign(mesh.point(w) - p, dir, broke);
    if (!s) return -1;
    if (s != prev) ++changes;
    prev = s;
  }
  return changes;
}

}  // namespace

RadoReport rado_critical_points(const TriMeshd& mesh, const Vec3& nu_in) {
  if (!(nu_in.norm() > 0)) throw RadoError("rado_critical_points: zero direction");
  const MeshTopology& topo = mesh.topology();
  const auto& F = mesh.faces();
  const Eigen::Index n = mesh.num_vertices();
  std::vector<std::vector<int>> rings(static_cast<std::size_t>(n));
  for (Eigen::Index v = 0; v < n; ++v)
    if (!topo.boundary_vertex(v)) rings[std::size_t(v)] = topo.one_ring(int(v), F);

  RadoReport rep;
  rep.nu = nu_in.normalized();
  Vec3 t1 = Vec3(0.5257311, 0.3090170, 0.7925671);
  t1 = (t1 - t1.dot(rep.nu) * rep.nu).normalized();
  const Vec3 dir[3] = {rep.nu, t1, rep.nu.cross(t1)};
  std::vector<int> count(static_cast<std::size_t>(n), 0);
  std::vector<char> broke(static_cast<std::size_t>(n), 0);
  parallel_for(std::size_t(n), [&](std::size_t b, std::size_t e) {
    for (std::size_t v = b; v < e; ++v)
      if (!rings[v].empty()) {
        bool br = false;
        count[v] = alternations(mesh, int(v), rings[v], dir, &br);
        broke[v] = br;
      }
  });
  for (Eigen::Index v = 0; v < n; ++v) {
    if (broke[std::size_t(v)]) rep.perturbed = true;
    if (count[std::size_t(v)] < 0) {
      std::ostringstream s;
      s << "rado_critical_points: degenerate edge on the link of vertex " << v << " at (" << mesh.point(v).transpose()
        << ")";
      throw RadoError(s.str());
    }
  }
  for (Eigen::Index v = 0; v < n; ++v) {
    if (rings[std::size_t(v)].empty()) continue;
    const int c = count[std::size_t(v)];
    if (c == 0) rep.extrema.push_back(int(v));
    if (c >= 4) {
      rep.critical.push_back({int(v), c / 2 - 1});
      rep.N += c / 2 - 1;
    }
  }
  return rep;
}

bool HPolyline::ends_on_boundary(const TriMeshd& mesh) const {
  if (closed) return true;
  const MeshTopology& topo = mesh.topology();
  auto on_boundary = [&](const EdgePoint& e) { return topo.boundary_vertex(e.a) && topo.boundary_vertex(e.b); };
  return on_boundary(at.front()) && on_boundary(at.back());
}

std::size_t HSet::size() const {
  std::size_t s = 0;
  for (const HPolyline& l : lines) s += l.pts.size();
  return s;
}

std::string to_string(HSource s) { return s == HSource::translator ? "translator" : "mean_curvature"; }

HSource parse_h_source(const std::string& s) {
  if (s == "mean_curvature") return HSource::mean_curvature;
  if (s == "translator") return HSource::translator;
  throw RadoError("unknown H source '" + s + "' (mean_curvature | translator)");
}

HSet h_zero_set(const TriMeshd& mesh, HSource source, double flat_tol) {
  if (!mesh.has_curvature()) throw RadoError("h_zero_set: differential quantities missing");
  const auto& N = mesh.normals();
  const Eigen::VectorXd H = source == HSource::translator ? Eigen::VectorXd(-N.col(2)) : mesh.mean_curvature();
  HSet out;
  if (H.size() == 0 || H.cwiseAbs().maxCoeff() <= flat_tol) {
    out.identically_zero = true;
    return out;
  }

  const MeshTopology& topo = mesh.topology();
  Eigen::VectorXd s = H;
  std::vector<std::vector<int>> nbrs(std::size_t(s.size()));
  for (Eigen::Index e = 0; e < topo.num_edges(); ++e) {
    nbrs[std::size_t(topo.edges(e, 0))].push_back(topo.edges(e, 1));
    nbrs[std::size_t(topo.edges(e, 1))].push_back(topo.edges(e, 0));
  }
  if (source == HSource::mean_curvature) {
    // The cotangent operator is meaningless on a boundary star; extend inward values outward.
    std::vector<char> known(std::size_t(s.size()));
    for (Eigen::Index v = 0; v < s.size(); ++v) known[std::size_t(v)] = !topo.boundary_vertex(v);
    for (bool changed = true; changed;) {
      changed = false;
      std::vector<std::pair<int, double>> fill;
      for (Eigen::Index v = 0; v < s.size(); ++v) {
        if (known[std::size_t(v)]) continue;
        double sum = 0;
        int n = 0;
        for (int w : nbrs[std::size_t(v)])
          if (known[std::size_t(w)]) sum += s(w), ++n;
        if (n) fill.emplace_back(int(v), sum / n);
      }
      for (auto [v, x] : fill) {
        s(v) = x;
        known[std::size_t(v)] = 1;
        changed = true;
      }
    }
  }
  for (Eigen::Index v = 0; v < s.size(); ++v)
    if (s(v) == 0) s(v) = std::numeric_limits<double>::min();
  Eigen::VectorXd fixed = s;
  for (Eigen::Index v = 0; v < s.size(); ++v) {
    if (topo.boundary_vertex(v) || nbrs[std::size_t(v)].empty()) continue;
    bool isolated = true;
    for (int w : nbrs[std::size_t(v)])
      if ((s(w) > 0) == (s(v) > 0)) isolated = false;
    if (isolated) {
      fixed(v) = -s(v);
      ++out.anomalies;
    }
  }

  out.field = fixed;
  for (LevelCurve& c : level_set(mesh, fixed)) {
    HPolyline l;
    l.closed = c.closed;
    l.pts = std::move(c.pts);
    l.at = std::move(c.at);
    for (const EdgePoint& e : l.at) {
      const Vec3 a = N.row(e.a), b = N.row(e.b);
      l.normals.push_back((a + e.w * (b - a)).normalized());
    }
    out.lines.push_back(std::move(l));
  }
  return out;
}

std::vector<EquatorArc> equator_arcs(const std::vector<std::vector<Vec3>>& paths, double gap) {
  std::vector<EquatorArc> ranges;
  for (const auto& path : paths) {
    bool started = false;
    double prev = 0, lo = 0, hi = 0;
    for (const Vec3& n : path) {
      if (!(std::hypot(n.x(), n.y()) > 0)) continue;
      double p = std::atan2(n.y(), n.x());
      if (started) {
        p = prev + std::remainder(p - prev, 2 * kPi);
      } else {
        lo = hi = p;
        started = true;
      }
      lo = std::min(lo, p), hi = std::max(hi, p);
      prev = p;
    }
    if (!started) continue;
    if (hi - lo >= 2 * kPi) return {{-kPi, kPi, 0, 0}};
    // Shift so that lo lies in (-pi, pi].
    const double shift = std::remainder(lo, 2 * kPi) - lo;
    ranges.push_back({lo + shift, hi + shift, 0, 0});
  }
  std::sort(ranges.begin(), ranges.end(), [](const EquatorArc& a, const EquatorArc& b) { return a.lo < b.lo; });

  std::vector<EquatorArc> arcs;
  for (const EquatorArc& r : ranges) {
    if (arcs.empty() || r.lo - arcs.back().hi > gap)
      arcs.push_back(r);
    else
      arcs.back().hi = std::max(arcs.back().hi, r.hi);
  }
  // Ranges past pi may reach around to the first arcs.
  while (arcs.size() > 1 && arcs.back().hi + gap >= arcs.front().lo + 2 * kPi) {
    arcs.back().hi = std::max(arcs.back().hi, arcs.front().hi + 2 * kPi);
    arcs.erase(arcs.begin());
  }
  if (!arcs.empty() && arcs.back().hi - arcs.back().lo >= 2 * kPi - gap) return {{-kPi, kPi, 0, 0}};
  auto to_axis = [](double p) { return std::abs(std::remainder(p, kPi)); };
  for (EquatorArc& a : arcs) {
    a.lo_to_axis = to_axis(a.lo);
    a.hi_to_axis = to_axis(a.hi);
  }
  return arcs;
}

std::vector<EquatorArc> gauss_equator_image(const HSet& hset, double gap) {
  std::vector<std::vector<Vec3>> paths;
  for (const HPolyline& l : hset.lines) paths.push_back(l.normals);
  return equator_arcs(paths, gap);
}

void write_equator_svg(std::ostream& out, const std::vector<EquatorArc>& arcs) {
  const double c = 150, r = 120;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"300\" height=\"300\">\n";
  out << "<circle cx=\"" << c << "\" cy=\"" << c << "\" r=\"" << r << "\" fill=\"none\" stroke=\"#999\"/>\n";
  out << "<text x=\"" << c + r + 4 << "\" y=\"" << c + 4 << "\" font-size=\"12\">e1</text>\n";
  out << "<text x=\"" << c - 8 << "\" y=\"" << c - r - 6 << "\" font-size=\"12\">e2</text>\n";
  for (const EquatorArc& a : arcs) {
    out << "<polyline fill=\"none\" stroke=\"#d62728\" stroke-width=\"5\" points=\"";
    const int steps = std::max(2, int(64 * a.length() / kPi));
    for (int k = 0; k <= steps; ++k) {
      const double p = a.lo + a.length() * k / steps;
      out << c + r * std::cos(p) << ',' << c - r * std::sin(p) << ' ';
    }
    out << "\"/>\n";
  }
  out << "</svg>\n";
}

int normal_preimage_count(const TriMeshd& mesh, const Vec3& nu_in) {
  if (!mesh.has_curvature()) throw RadoError("normal_preimage_count: differential quantities missing");
  const Vec3 nu = nu_in.normalized();
  if (std::abs(nu.z()) > 1e-9) throw RadoError("normal_preimage_count: direction must be horizontal");
  if (std::abs(std::remainder(std::atan2(nu.y(), nu.x()), kPi)) < 0.05)
    throw RadoError("normal_preimage_count: direction within 0.05 rad of +-e1");

  const auto& F = mesh.faces();
  const auto& N = mesh.normals();
  std::vector<char> hit(std::size_t(F.rows()), 0);
  parallel_for(std::size_t(F.rows()), [&](std::size_t b, std::size_t e) {
    for (std::size_t f = b; f < e; ++f) {
      Eigen::Matrix3d M;
      for (int k = 0; k < 3; ++k) M.col(k) = N.row(F(Eigen::Index(f), k)).transpose();
      if (nu.dot(M.rowwise().sum()) <= 0) continue;
      const Eigen::FullPivLU<Eigen::Matrix3d> lu(M);
      if (!lu.isInvertible()) continue;
      const Vec3 c = lu.solve(nu);
      hit[f] = c.minCoeff() >= -1e-12;
    }
  });

  const MeshTopology& topo = mesh.topology();
  std::vector<int> parent(std::size_t(F.rows()));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[std::size_t(x)] != x) x = parent[std::size_t(x)] = parent[std::size_t(parent[std::size_t(x)])];
    return x;
  };
  // Faces sharing a vertex belong to the same preimage point.
  for (const auto& fan : topo.vertex_faces) {
    int first = -1;
    for (int f : fan)
      if (hit[std::size_t(f)]) {
        if (first < 0)
          first = f;
        else if (const int a = find(first), b = find(f); a != b)
          parent[std::size_t(std::max(a, b))] = std::min(a, b);
      }
  }
  int count = 0;
  for (Eigen::Index f = 0; f < F.rows(); ++f)
    if (hit[std::size_t(f)] && find(int(f)) == int(f)) ++count;
  return count;
}

TangentSplit tangent_plane_components(const TriMeshd& mesh, const Vec3& q, const Vec3& n_in, double h) {
  if (!(h > 0)) h = mesh.median_edge_length();
  Vec3 n(n_in.x(), n_in.y(), 0);
  if (!(n.norm() > 0)) throw RadoError("tangent_plane_components: normal has no horizontal part");
  n.normalize();
  const MeshTopology& topo = mesh.topology();
  for (Eigen::Index v = 0; v < mesh.num_vertices(); ++v)
    if (topo.boundary_vertex(v) && (mesh.point(v) - q).norm() < 3 * h) {
      std::ostringstream s;
      s << "tangent_plane_components: q is within 3h of boundary vertex " << v;
      throw RadoError(s.str());
    }

  const auto& F = mesh.faces();
  const Eigen::VectorXd d = (mesh.vertices().rowwise() - q.transpose()) * n;
  std::vector<int> side(std::size_t(F.rows()), 0);
  for (Eigen::Index f = 0; f < F.rows(); ++f) {
    const double a = d(F(f, 0)), b = d(F(f, 1)), c = d(F(f, 2));
    if (std::min({a, b, c}) > h)
      side[std::size_t(f)] = 1;
    else if (std::max({a, b, c}) < -h)
      side[std::size_t(f)] = -1;
  }

  TangentSplit out;
  std::vector<char> seen(std::size_t(F.rows()), 0);
  std::vector<int> stack;
  for (Eigen::Index f0 = 0; f0 < F.rows(); ++f0) {
    if (!side[std::size_t(f0)] || seen[std::size_t(f0)]) continue;
    ++out.total;
    (side[std::size_t(f0)] > 0 ? out.positive : out.negative)++;
    stack.assign(1, int(f0));
    seen[std::size_t(f0)] = 1;
    while (!stack.empty()) {
      const int f = stack.back();
      stack.pop_back();
      for (int k = 0; k < 3; ++k) {
        const int g = topo.opposite_face(topo.face_edges(f, k), f);
        if (g >= 0 && side[std::size_t(g)] && !seen[std::size_t(g)]) {
          seen[std::size_t(g)] = 1;
          stack.push_back(g);
        }
      }
    }
  }
  return out;
}

}  // namespace tslab
