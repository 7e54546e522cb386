#pragma once

#include "tslab/mesh.hpp"

#include <string>
#include <vector>

namespace tslab {

/// Graph direction v = sin(theta) e3 + cos(theta) e2 together with the frame
/// {e1, w}, w = cos(theta) e3 - sin(theta) e2, of the plane orthogonal to v.
struct GraphDirection {
  double theta = 0;
  double s = 0;  // sin theta
  double c = 1;  // cos theta

  /// theta = pi/2 maps to (s, c) = (1, 0) exactly.
  static GraphDirection from_angle(double theta);
  static GraphDirection vertical() { return from_angle(1.5707963267948966); }
  Vec3 v() const { return {0, c, s}; }
  Vec3 w() const { return {0, -s, c}; }
};

/// Node values of a graph over a tensor grid (a_i, b_j) in the plane [v]^perp.
struct HeightField {
  GraphDirection dir;
  Eigen::VectorXd a, b;
  Eigen::MatrixXd u;  // u(i, j) at (a_i, b_j)
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> dirichlet;
  double h = 0;  // nominal spacing

  HeightField() = default;
  HeightField(GraphDirection d, Eigen::VectorXd a_nodes, Eigen::VectorXd b_nodes, double spacing);

  Eigen::Index na() const { return a.size(); }
  Eigen::Index nb() const { return b.size(); }
  Vec3 point(Eigen::Index i, Eigen::Index j) const {
    return a(i) * Vec3::UnitX() + b(j) * dir.w() + u(i, j) * dir.v();
  }
  bool on_grid_boundary(Eigen::Index i, Eigen::Index j) const {
    return i == 0 || j == 0 || i + 1 == na() || j + 1 == nb();
  }
  /// Throws std::invalid_argument when nodes are not increasing, values are
  /// not finite or a grid-boundary node lacks Dirichlet data.
  void validate() const;
};

/// Nodes on [lo, hi] with spacing about h, refined geometrically toward each
/// focus: spacing shrinks by `ratio` per level for `levels` levels. Within
/// `core` of a focus the finest spacing h ratio^levels is kept uniform.
Eigen::VectorXd graded_nodes(double lo, double hi, double h, const std::vector<double>& foci = {},
                             double ratio = 0.8, int levels = 6, double core = 0);
Eigen::VectorXd uniform_nodes(double lo, double hi, double h);

/// Graph mesh X(a, b) = a e1 + b w + u v, oriented toward +v.
TriMeshd height_field_mesh(const HeightField& f);

/// CSV rows (a, b, u, dirichlet) and a JSON header with theta, h, domain and mask counts.
void write_height_field(const HeightField& f, const std::string& csv_path, const std::string& json_path);

}  // namespace tslab
