#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tslab {

template <typename Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using VertexMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, 3, Eigen::RowMajor>;
using FaceMatrix = Eigen::Matrix<int, Eigen::Dynamic, 3, Eigen::RowMajor>;
using EdgeMatrix = Eigen::Matrix<int, Eigen::Dynamic, 2, Eigen::RowMajor>;
using BoolArray = Eigen::Array<bool, Eigen::Dynamic, 1>;

class MeshError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Edge/face incidence for a manifold, consistently oriented triangle mesh.
struct MeshTopology {
  EdgeMatrix edges;       // (lo, hi), lo < hi
  EdgeMatrix edge_faces;  // second entry is -1 on boundary edges
  FaceMatrix face_edges;  // face_edges(f, k) joins F(f, k) and F(f, (k + 1) % 3)
  std::vector<std::vector<int>> vertex_faces;
  BoolArray boundary_vertex;
  BoolArray boundary_edge;

  Eigen::Index num_edges() const { return edges.rows(); }
  /// Neighbours of an interior vertex in counter-clockwise order. For
  /// boundary vertices the fan is returned from one boundary edge to the other.
  std::vector<int> one_ring(int v, const FaceMatrix& F) const;
  /// Face across edge e from face f, or -1.
  int opposite_face(int e, int f) const {
    return edge_faces(e, 0) == f ? edge_faces(e, 1) : edge_faces(e, 0);
  }
};

/// Throws MeshError on out-of-range indices, repeated corners, non-manifold
/// edges or inconsistent orientation.
MeshTopology build_topology(const FaceMatrix& F, Eigen::Index num_vertices);

template <typename Scalar>
Scalar triangle_area(const Vector3<Scalar>& a, const Vector3<Scalar>& b, const Vector3<Scalar>& c) {
  return Scalar(0.5) * (b - a).cross(c - a).norm();
}

/// Immutable triangle mesh. Normals and mean curvature are attached by
/// differential_quantities().
template <typename Scalar>
class TriMesh {
 public:
  using Point = Vector3<Scalar>;

  TriMesh() : topo_(std::make_shared<MeshTopology>()) {}

  TriMesh(VertexMatrix<Scalar> V, FaceMatrix F, Scalar min_area = Scalar(1e-12))
      : V_(std::move(V)), F_(std::move(F)) {
    if (!V_.allFinite()) throw MeshError("mesh has non-finite vertex coordinates");
    for (Eigen::Index f = 0; f < F_.rows(); ++f) {
      for (int k = 0; k < 3; ++k)
        if (F_(f, k) < 0 || F_(f, k) >= V_.rows())
          throw MeshError("face " + std::to_string(f) + " references missing vertex " +
                          std::to_string(F_(f, k)));
      if (triangle_area<Scalar>(point(F_(f, 0)), point(F_(f, 1)), point(F_(f, 2))) <= min_area)
        throw MeshError("face " + std::to_string(f) + " is degenerate");
    }
    topo_ = std::make_shared<const MeshTopology>(build_topology(F_, V_.rows()));
  }

  const VertexMatrix<Scalar>& vertices() const { return V_; }
  const FaceMatrix& faces() const { return F_; }
  const MeshTopology& topology() const { return *topo_; }
  Eigen::Index num_vertices() const { return V_.rows(); }
  Eigen::Index num_faces() const { return F_.rows(); }
  Point point(Eigen::Index v) const { return V_.row(v).transpose(); }
  bool is_boundary(Eigen::Index v) const { return topo_->boundary_vertex(v); }
  const BoolArray& boundary() const { return topo_->boundary_vertex; }

  bool has_curvature() const { return normals_.has_value() && curvature_.has_value(); }
  const VertexMatrix<Scalar>& normals() const {
    if (!normals_) throw MeshError("mesh normals not computed");
    return *normals_;
  }
  const VectorX<Scalar>& mean_curvature() const {
    if (!curvature_) throw MeshError("mesh curvature not computed");
    return *curvature_;
  }
  Point normal(Eigen::Index v) const { return normals().row(v).transpose(); }

  TriMesh with_curvature(VertexMatrix<Scalar> N, VectorX<Scalar> H) const {
    TriMesh out(*this);
    out.normals_ = std::move(N);
    out.curvature_ = std::move(H);
    return out;
  }

  Scalar area() const {
    Scalar s = 0;
    for (Eigen::Index f = 0; f < F_.rows(); ++f)
      s += triangle_area<Scalar>(point(F_(f, 0)), point(F_(f, 1)), point(F_(f, 2)));
    return s;
  }

  /// Median edge length; used as the nominal spacing when none is supplied.
  Scalar median_edge_length() const {
    const auto& E = topo_->edges;
    if (E.rows() == 0) return Scalar(0);
    std::vector<Scalar> len(E.rows());
    for (Eigen::Index e = 0; e < E.rows(); ++e) len[e] = (point(E(e, 0)) - point(E(e, 1))).norm();
    std::nth_element(len.begin(), len.begin() + len.size() / 2, len.end());
    return len[len.size() / 2];
  }

 private:
  VertexMatrix<Scalar> V_;
  FaceMatrix F_;
  std::shared_ptr<const MeshTopology> topo_;
  std::optional<VertexMatrix<Scalar>> normals_;
  std::optional<VectorX<Scalar>> curvature_;
};

using TriMeshd = TriMesh<double>;
using Vec3 = Vector3<double>;

/// Rigid motion p -> R p + t applied to every vertex. Curvature data is dropped.
template <typename Scalar>
TriMesh<Scalar> transformed(const TriMesh<Scalar>& m, const Eigen::Matrix<Scalar, 3, 3>& R,
                            const Vector3<Scalar>& t = Vector3<Scalar>::Zero()) {
  VertexMatrix<Scalar> V = (m.vertices() * R.transpose()).rowwise() + t.transpose();
  if (R.determinant() < 0) {
    FaceMatrix F = m.faces();
    F.col(1).swap(F.col(2));
    return TriMesh<Scalar>(std::move(V), std::move(F));
  }
  return TriMesh<Scalar>(std::move(V), m.faces());
}

template <typename Scalar>
TriMesh<Scalar> rotated_about_z(const TriMesh<Scalar>& m, Scalar angle) {
  Eigen::Matrix<Scalar, 3, 3> R = Eigen::AngleAxis<Scalar>(angle, Vector3<Scalar>::UnitZ()).toRotationMatrix();
  return transformed(m, R);
}

template <typename Scalar>
TriMesh<Scalar> translated(const TriMesh<Scalar>& m, const Vector3<Scalar>& t) {
  return transformed<Scalar>(m, Eigen::Matrix<Scalar, 3, 3>::Identity(), t);
}

/// Same surface with reversed orientation.
template <typename Scalar>
TriMesh<Scalar> flipped(const TriMesh<Scalar>& m) {
  FaceMatrix F = m.faces();
  F.col(1).swap(F.col(2));
  return TriMesh<Scalar>(m.vertices(), std::move(F));
}

/// Structured triangulation of an nu x nv grid of points (row-major, u slowest).
/// Faces are wound so that (dP/du x dP/dv) is the normal.
template <typename Scalar>
TriMesh<Scalar> grid_mesh(const VertexMatrix<Scalar>& P, int nu, int nv, bool periodic_v = false) {
  const int cells_v = periodic_v ? nv : nv - 1;
  FaceMatrix F(2 * (nu - 1) * cells_v, 3);
  int f = 0;
  for (int i = 0; i + 1 < nu; ++i)
    for (int j = 0; j < cells_v; ++j) {
      const int j1 = (j + 1) % nv;
      const int a = i * nv + j, b = (i + 1) * nv + j, c = (i + 1) * nv + j1, d = i * nv + j1;
      F.row(f++) << a, b, c;
      F.row(f++) << a, c, d;
    }
  return TriMesh<Scalar>(P, std::move(F));
}

}  // namespace tslab
