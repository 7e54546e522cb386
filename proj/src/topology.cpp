#include "tslab/mesh.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <unordered_map>

namespace tslab {

namespace {
std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (std::uint64_t(std::uint32_t(a)) << 32) | std::uint32_t(b);
}
}  // namespace

MeshTopology build_topology(const FaceMatrix& F, Eigen::Index num_vertices) {
  MeshTopology t;
  const Eigen::Index nf = F.rows();
  std::unordered_map<std::uint64_t, int> index;
  index.reserve(std::size_t(nf) * 2);
  std::vector<std::array<int, 2>> edges, edge_faces;
  std::vector<int> first_dir;  // +1 if the first face traverses lo->hi
  t.face_edges.resize(nf, 3);
  t.vertex_faces.assign(num_vertices, {});

  for (Eigen::Index f = 0; f < nf; ++f) {
    const int a = F(f, 0), b = F(f, 1), c = F(f, 2);
    if (a == b || b == c || a == c) throw MeshError("face " + std::to_string(f) + " repeats a vertex");
    for (int k = 0; k < 3; ++k) {
      const int u = F(f, k), v = F(f, (k + 1) % 3);
      const int dir = u < v ? 1 : -1;
      auto [it, fresh] = index.emplace(edge_key(u, v), int(edges.size()));
      if (fresh) {
        edges.push_back({std::min(u, v), std::max(u, v)});
        edge_faces.push_back({int(f), -1});
        first_dir.push_back(dir);
      } else {
        const int e = it->second;
        if (edge_faces[e][1] != -1)
          throw MeshError("non-manifold edge (" + std::to_string(edges[e][0]) + ", " +
                          std::to_string(edges[e][1]) + ")");
        if (first_dir[e] == dir)
          throw MeshError("inconsistent orientation across edge (" + std::to_string(edges[e][0]) +
                          ", " + std::to_string(edges[e][1]) + ")");
        edge_faces[e][1] = int(f);
      }
      t.face_edges(f, k) = it->second;
      t.vertex_faces[u].push_back(int(f));
    }
  }

  const Eigen::Index ne = Eigen::Index(edges.size());
  t.edges.resize(ne, 2);
  t.edge_faces.resize(ne, 2);
  t.boundary_edge = BoolArray::Constant(ne, false);
  t.boundary_vertex = BoolArray::Constant(num_vertices, false);
  for (Eigen::Index e = 0; e < ne; ++e) {
    t.edges.row(e) << edges[e][0], edges[e][1];
    t.edge_faces.row(e) << edge_faces[e][0], edge_faces[e][1];
    if (edge_faces[e][1] < 0) {
      t.boundary_edge(e) = true;
      t.boundary_vertex(edges[e][0]) = true;
      t.boundary_vertex(edges[e][1]) = true;
    }
  }
  return t;
}

std::vector<int> MeshTopology::one_ring(int v, const FaceMatrix& F) const {
  // Each incident face (v, a, b) in winding order contributes the link edge a -> b.
  std::unordered_map<int, int> next, prev;
  for (int f : vertex_faces[v]) {
    int k = 0;
    while (F(f, k) != v) ++k;
    const int a = F(f, (k + 1) % 3), b = F(f, (k + 2) % 3);
    next[a] = b;
    prev[b] = a;
  }
  if (next.empty()) return {};
  int start = next.begin()->first;
  if (boundary_vertex(v)) {
    for (auto& [a, b] : next)
      if (!prev.count(a)) {
        start = a;
        break;
      }
  } else {
    int best = start;
    for (auto& kv : next) best = std::min(best, kv.first);
    start = best;
  }
  std::vector<int> ring{start};
  for (int cur = start;;) {
    auto it = next.find(cur);
    if (it == next.end() || it->second == start) break;
    cur = it->second;
    ring.push_back(cur);
    if (ring.size() > next.size() + 1) throw MeshError("vertex " + std::to_string(v) + " is not a manifold vertex");
  }
  return ring;
}

}  // namespace tslab
