#include "tslab/slicing.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

namespace tslab {

std::string to_string(Exit e) {
  switch (e) {
    case Exit::top: return "TOP";
    case Exit::bottom: return "BOTTOM";
    case Exit::side: return "SIDE";
    case Exit::closed: return "CLOSED";
  }
  return "?";
}

Eigen::Vector2d Polyline::mean() const {
  Eigen::Vector2d m = Eigen::Vector2d::Zero();
  for (const auto& p : pts) m += p;
  return pts.empty() ? m : Eigen::Vector2d(m / double(pts.size()));
}

namespace {

Eigen::VectorXd signed_distance(const TriMeshd& mesh, const Vec3& n, double offset) {
  return mesh.vertices() * n - Eigen::VectorXd::Constant(mesh.num_vertices(), offset);
}

}  // namespace

std::vector<LevelCurve> level_set(const TriMeshd& mesh, const Eigen::VectorXd& s) {
  const MeshTopology& topo = mesh.topology();
  const auto& F = mesh.faces();
  std::vector<int> crossing(std::size_t(topo.num_edges()), -1);
  std::vector<EdgePoint> point;
  auto crossing_of = [&](int e) {
    int& c = crossing[std::size_t(e)];
    if (c < 0) {
      const int a = topo.edges(e, 0), b = topo.edges(e, 1);
      c = int(point.size());
      point.push_back({a, b, s(a) / (s(a) - s(b))});
    }
    return c;
  };

  // Segments as (crossing, crossing, face); adjacency per crossing.
  std::vector<std::array<int, 3>> seg;
  for (Eigen::Index f = 0; f < F.rows(); ++f) {
    int ends[2], m = 0;
    for (int k = 0; k < 3; ++k) {
      const int a = F(f, k), b = F(f, (k + 1) % 3);
      if ((s(a) > 0) != (s(b) > 0)) {
        if (m == 2) throw SliceError("level set: triangle " + std::to_string(f) + " crossed more than twice");
        ends[m++] = crossing_of(topo.face_edges(f, k));
      }
    }
    if (m == 2) seg.push_back({ends[0], ends[1], int(f)});
  }
  std::vector<std::vector<int>> adj(point.size());
  for (std::size_t k = 0; k < seg.size(); ++k)
    for (int j = 0; j < 2; ++j) {
      auto& a = adj[std::size_t(seg[k][std::size_t(j)])];
      a.push_back(int(k));
      if (a.size() > 2) throw SliceError("level set: non-manifold chaining at triangle " + std::to_string(seg[k][2]));
    }

  std::vector<LevelCurve> out;
  std::vector<bool> used(seg.size(), false);
  auto add = [&](LevelCurve& c, int id) {
    const EdgePoint& e = point[std::size_t(id)];
    c.at.push_back(e);
    c.pts.push_back(mesh.point(e.a) + e.w * (mesh.point(e.b) - mesh.point(e.a)));
  };
  auto walk = [&](int start, bool closed) {
    LevelCurve c;
    c.closed = closed;
    int id = start;
    add(c, id);
    for (;;) {
      int next = -1;
      for (int k : adj[std::size_t(id)])
        if (!used[std::size_t(k)]) {
          next = k;
          break;
        }
      if (next < 0) break;
      used[std::size_t(next)] = true;
      const auto& sg = seg[std::size_t(next)];
      id = sg[0] == id ? sg[1] : sg[0];
      c.faces.push_back(sg[2]);
      add(c, id);
      if (id == start) break;
    }
    out.push_back(std::move(c));
  };
  for (std::size_t c = 0; c < point.size(); ++c)
    if (adj[c].size() == 1 && !used[std::size_t(adj[c][0])]) walk(int(c), false);
  for (std::size_t k = 0; k < seg.size(); ++k)
    if (!used[k]) walk(seg[k][0], true);
  return out;
}

SliceSet slice_plane(const TriMeshd& mesh, const Vec3& normal, double offset, SliceAxis axis) {
  const Vec3 n = normal.normalized();
  const double h = mesh.median_edge_length();
  const double tiny = 1e-12 * std::max(1.0, mesh.vertices().cwiseAbs().maxCoeff());
  Eigen::VectorXd s = signed_distance(mesh, n, offset);
  for (int k = 0; k < 100 && s.size() && s.cwiseAbs().minCoeff() <= tiny; ++k) {
    offset += h > 0 ? h / 100 : 1e-6;
    s = signed_distance(mesh, n, offset);
  }

  SliceSet out;
  out.axis = axis;
  out.normal = n;
  out.t = offset;
  const bool horizontal = std::abs(n.z()) > 1 - 1e-12;
  const Vec3 u = horizontal ? Vec3::UnitX() : Vec3(n.cross(Vec3::UnitZ()).normalized());
  const Vec3 v = horizontal ? Vec3::UnitY() : Vec3::UnitZ();

  for (LevelCurve& c : level_set(mesh, s)) {
    Polyline line;
    line.pts3 = std::move(c.pts);
    line.faces = std::move(c.faces);
    for (const Vec3& p : line.pts3) line.pts.emplace_back(p.dot(u), p.dot(v));
    if (c.closed) line.start = line.end = Exit::closed;
    out.lines.push_back(std::move(line));
  }

  std::vector<Vec3> point;
  for (const Polyline& l : out.lines) point.insert(point.end(), l.pts3.begin(), l.pts3.end());
  out.z_min = std::numeric_limits<double>::infinity();
  out.z_max = -out.z_min;
  for (const Vec3& p : point) {
    out.z_min = std::min(out.z_min, p.z());
    out.z_max = std::max(out.z_max, p.z());
  }
  const double range = out.z_max - out.z_min;
  auto code = [&](const Vec3& p) {
    if (horizontal) return Exit::side;
    if (p.z() >= out.z_max - 0.25 * range) return Exit::top;
    if (p.z() <= out.z_min + 0.25 * range) return Exit::bottom;
    return Exit::side;
  };
  for (Polyline& line : out.lines)
    if (!line.closed()) {
      line.start = code(line.pts3.front());
      line.end = code(line.pts3.back());
    }
  return out;
}

SliceSet slice_y(const TriMeshd& mesh, double t) { return slice_plane(mesh, Vec3::UnitY(), t, SliceAxis::y); }

SliceSet slice_z(const TriMeshd& mesh, double z) { return slice_plane(mesh, Vec3::UnitZ(), z, SliceAxis::z); }

SliceSet slice_skew(const TriMeshd& mesh, double y0, double alpha) {
  const Vec3 n(-std::sin(alpha), std::cos(alpha), 0);
  return slice_plane(mesh, n, n.y() * y0, SliceAxis::skew);
}

int count_components_above(const TriMeshd& mesh, const Vec3& normal, double offset) {
  const Eigen::VectorXd s = signed_distance(mesh, normal.normalized(), offset);
  const auto& F = mesh.faces();
  const MeshTopology& topo = mesh.topology();
  std::vector<int> parent(std::size_t(F.rows()));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[std::size_t(x)] != x) x = parent[std::size_t(x)] = parent[std::size_t(parent[std::size_t(x)])];
    return x;
  };
  auto active = [&](Eigen::Index f) { return s(F(f, 0)) > 0 || s(F(f, 1)) > 0 || s(F(f, 2)) > 0; };
  for (Eigen::Index e = 0; e < topo.num_edges(); ++e) {
    const int f = topo.edge_faces(e, 0), g = topo.edge_faces(e, 1);
    if (g < 0 || !(s(topo.edges(e, 0)) > 0 || s(topo.edges(e, 1)) > 0)) continue;
    const int a = find(f), b = find(g);
    if (a != b) parent[std::size_t(std::max(a, b))] = std::min(a, b);
  }
  int count = 0;
  for (Eigen::Index f = 0; f < F.rows(); ++f)
    if (active(f) && find(int(f)) == int(f)) ++count;
  return count;
}

void write_slices_csv(std::ostream& out, const std::vector<SliceSet>& slices) {
  out.precision(17);
  out << "t,component_id,point_index,x,z,exit_start,exit_end\n";
  for (const SliceSet& s : slices)
    for (std::size_t c = 0; c < s.lines.size(); ++c)
      for (std::size_t k = 0; k < s.lines[c].pts.size(); ++k)
        out << s.t << ',' << c << ',' << k << ',' << s.lines[c].pts[k].x() << ',' << s.lines[c].pts[k].y() << ','
            << to_string(s.lines[c].start) << ',' << to_string(s.lines[c].end) << '\n';
}

void write_slice_svg(std::ostream& out, const SliceSet& s) {
  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  for (const Polyline& l : s.lines)
    for (const auto& p : l.pts) {
      x0 = std::min(x0, p.x()), x1 = std::max(x1, p.x());
      y0 = std::min(y0, p.y()), y1 = std::max(y1, p.y());
    }
  if (!(x1 >= x0)) x0 = y0 = 0, x1 = y1 = 1;
  const double W = 600, H = 600, pad = 20;
  const double scale = std::min((W - 2 * pad) / std::max(x1 - x0, 1e-9), (H - 2 * pad) / std::max(y1 - y0, 1e-9));
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  out << "<text x=\"10\" y=\"16\" font-size=\"12\">t = " << s.t << "</text>\n";
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  for (std::size_t c = 0; c < s.lines.size(); ++c) {
    out << "<polyline fill=\"none\" stroke-width=\"1.5\" stroke=\"" << colors[c % 6] << "\" points=\"";
    for (const auto& p : s.lines[c].pts)
      out << pad + (p.x() - x0) * scale << ',' << H - pad - (p.y() - y0) * scale << ' ';
    out << "\"/>\n";
  }
  out << "</svg>\n";
}

}  // namespace tslab
