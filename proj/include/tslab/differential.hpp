#pragma once

#include "tslab/mesh.hpp"

#include <limits>

namespace tslab {

/// Area-weighted unit vertex normals; orientation follows the face winding.
template <typename Scalar>
VertexMatrix<Scalar> vertex_normals(const TriMesh<Scalar>& m) {
  const auto& V = m.vertices();
  const auto& F = m.faces();
  VertexMatrix<Scalar> N = VertexMatrix<Scalar>::Zero(V.rows(), 3);
  for (Eigen::Index f = 0; f < F.rows(); ++f) {
    const Vector3<Scalar> a = V.row(F(f, 0)), b = V.row(F(f, 1)), c = V.row(F(f, 2));
    const Vector3<Scalar> n = (b - a).cross(c - a);
    for (int k = 0; k < 3; ++k) N.row(F(f, k)) += n.transpose();
  }
  for (Eigen::Index v = 0; v < N.rows(); ++v) {
    const Scalar len = N.row(v).norm();
    if (len > Scalar(0)) N.row(v) /= len;
  }
  return N;
}

/// Circumcentric dual areas, signed cotangent form. A vertex whose dual area
/// drops below a quarter of its barycentric area takes the barycentric one.
template <typename Scalar>
VectorX<Scalar> vertex_areas(const TriMesh<Scalar>& m) {
  const auto& V = m.vertices();
  const auto& F = m.faces();
  VectorX<Scalar> A = VectorX<Scalar>::Zero(V.rows()), B = VectorX<Scalar>::Zero(V.rows());
  for (Eigen::Index f = 0; f < F.rows(); ++f) {
    const Vector3<Scalar> p[3] = {V.row(F(f, 0)), V.row(F(f, 1)), V.row(F(f, 2))};
    const Scalar area = Scalar(0.5) * (p[1] - p[0]).cross(p[2] - p[0]).norm();
    Scalar dots[3];
    for (int k = 0; k < 3; ++k) dots[k] = (p[(k + 1) % 3] - p[k]).dot(p[(k + 2) % 3] - p[k]);
    for (int k = 0; k < 3; ++k) {
      const int i = F(f, k), j = (k + 1) % 3, l = (k + 2) % 3;
      const Scalar cot_l = dots[l] / (Scalar(2) * area);
      const Scalar cot_j = dots[j] / (Scalar(2) * area);
      A(i) += ((p[j] - p[k]).squaredNorm() * cot_l + (p[l] - p[k]).squaredNorm() * cot_j) / Scalar(8);
      B(i) += area / Scalar(3);
    }
  }
  for (Eigen::Index v = 0; v < A.size(); ++v)
    if (!(A(v) >= B(v) / Scalar(4))) A(v) = B(v);
  return A;
}

/// Cotangent Laplacian of the embedding. Equals the mean curvature vector,
/// magnitude = sum of principal curvatures (unit sphere: -2x).
template <typename Scalar>
VertexMatrix<Scalar> mean_curvature_vectors(const TriMesh<Scalar>& m) {
  const auto& V = m.vertices();
  const auto& F = m.faces();
  VertexMatrix<Scalar> K = VertexMatrix<Scalar>::Zero(V.rows(), 3);
  for (Eigen::Index f = 0; f < F.rows(); ++f) {
    const Vector3<Scalar> p[3] = {V.row(F(f, 0)), V.row(F(f, 1)), V.row(F(f, 2))};
    const Scalar twice_area = (p[1] - p[0]).cross(p[2] - p[0]).norm();
    for (int k = 0; k < 3; ++k) {
      // cot of the angle at corner k weighs the opposite edge (j, l).
      const int j = (k + 1) % 3, l = (k + 2) % 3;
      const Scalar cot_k = (p[j] - p[k]).dot(p[l] - p[k]) / twice_area;
      const Vector3<Scalar> d = cot_k * (p[l] - p[j]);
      K.row(F(f, j)) += d.transpose();
      K.row(F(f, l)) -= d.transpose();
    }
  }
  const VectorX<Scalar> A = vertex_areas(m);
  for (Eigen::Index v = 0; v < V.rows(); ++v) K.row(v) /= Scalar(2) * A(v);
  return K;
}

/// Fills unit normals and scalar H = -<H_vec, N>. With the outward normal a
/// unit sphere gives H = 2; an upward-oriented vertical graph gives H = -1/W
/// on translators.
template <typename Scalar>
TriMesh<Scalar> differential_quantities(const TriMesh<Scalar>& m) {
  VertexMatrix<Scalar> N = vertex_normals(m);
  const VertexMatrix<Scalar> K = mean_curvature_vectors(m);
  VectorX<Scalar> H = -(K.cwiseProduct(N)).rowwise().sum();
  return m.with_curvature(std::move(N), std::move(H));
}

/// Interior vertices whose one-ring avoids the boundary.
template <typename Scalar>
BoolArray reliable_vertices(const TriMesh<Scalar>& m) {
  const auto& t = m.topology();
  BoolArray ok = !t.boundary_vertex;
  for (Eigen::Index e = 0; e < t.num_edges(); ++e) {
    const int a = t.edges(e, 0), b = t.edges(e, 1);
    if (t.boundary_vertex(a)) ok(b) = false;
    if (t.boundary_vertex(b)) ok(a) = false;
  }
  return ok;
}

template <typename Scalar>
struct ResidualReport {
  VectorX<Scalar> per_vertex;
  BoolArray reliable;
  Scalar max_interior = 0;
  Eigen::Index argmax = -1;

  /// Maximum over reliable vertices accepted by pred(point).
  template <typename Pred>
  Scalar max_where(const TriMesh<Scalar>& m, Pred pred) const {
    Scalar best = 0;
    for (Eigen::Index v = 0; v < per_vertex.size(); ++v)
      if (reliable(v) && pred(m.point(v))) best = std::max(best, per_vertex(v));
    return best;
  }
};

/// |H + <e3, N>| per vertex. Flipping the orientation negates both terms, so
/// the value does not depend on the global orientation.
template <typename Scalar>
ResidualReport<Scalar> translator_residual(const TriMesh<Scalar>& m) {
  if (!m.has_curvature()) throw MeshError("translator_residual: differential quantities missing");
  ResidualReport<Scalar> r;
  r.per_vertex = (m.mean_curvature() + m.normals().col(2)).cwiseAbs();
  r.reliable = reliable_vertices(m);
  for (Eigen::Index v = 0; v < r.per_vertex.size(); ++v)
    if (r.reliable(v) && (r.argmax < 0 || r.per_vertex(v) > r.max_interior)) {
      r.max_interior = r.per_vertex(v);
      r.argmax = v;
    }
  return r;
}

/// Area in the conformal metric e^z <.,.>, centroid rule.
template <typename Scalar>
Scalar g_area(const TriMesh<Scalar>& m) {
  const auto& V = m.vertices();
  const auto& F = m.faces();
  Scalar s = 0;
  for (Eigen::Index f = 0; f < F.rows(); ++f) {
    const Vector3<Scalar> a = V.row(F(f, 0)), b = V.row(F(f, 1)), c = V.row(F(f, 2));
    const Scalar zbar = (a(2) + b(2) + c(2)) / Scalar(3);
    s += std::exp(zbar) * Scalar(0.5) * (b - a).cross(c - a).norm();
  }
  return s;
}

template <typename Scalar>
long euler_characteristic(const TriMesh<Scalar>& m) {
  return long(m.num_vertices()) - long(m.topology().num_edges()) + long(m.num_faces());
}

}  // namespace tslab
