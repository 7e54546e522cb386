#pragma once

#include "tslab/mesh.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace tslab {

class SliceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Exit { top, bottom, side, closed };
std::string to_string(Exit e);

enum class SliceAxis { y, z, skew };

struct Polyline {
  std::vector<Eigen::Vector2d> pts;  // in-plane coordinates
  std::vector<Vec3> pts3;
  std::vector<int> faces;  // face crossed by segment k (pts[k], pts[k + 1])
  Exit start = Exit::side, end = Exit::side;
  bool closed() const { return start == Exit::closed; }
  Eigen::Vector2d mean() const;
};

/// Point on edge (a, b) at a + w (b - a).
struct EdgePoint {
  int a, b;
  double w;
};

struct LevelCurve {
  std::vector<Vec3> pts;
  std::vector<EdgePoint> at;
  std::vector<int> faces;  // face crossed by segment k
  bool closed = false;
};

/// Zero set of a per-vertex field by marching triangles, chained into curves.
/// Values must be nonzero; throws SliceError on non-manifold chaining.
std::vector<LevelCurve> level_set(const TriMeshd& mesh, const Eigen::VectorXd& values);

/// Mesh intersected with {<n, p> = offset}. For vertical planes the in-plane
/// coordinates are (<p, u>, z) with u = e3 x n; for horizontal planes (x, y).
/// Open ends are TOP or BOTTOM when they lie in the upper or lower quarter of
/// the slice's own z-range, SIDE otherwise.
struct SliceSet {
  SliceAxis axis = SliceAxis::y;
  Vec3 normal = Vec3::UnitY();
  double t = 0;  // offset actually used after nudging
  double z_min = 0, z_max = 0;
  std::vector<Polyline> lines;
};

/// Marching triangles through the plane <normal, p> = offset; vertices lying on
/// the plane push the offset by h / 100 (h the median edge length).
SliceSet slice_plane(const TriMeshd& mesh, const Vec3& normal, double offset, SliceAxis axis = SliceAxis::skew);
SliceSet slice_y(const TriMeshd& mesh, double t);
SliceSet slice_z(const TriMeshd& mesh, double z);
/// Vertical plane through (0, y0) whose horizontal normal makes angle alpha with e2.
SliceSet slice_skew(const TriMeshd& mesh, double y0, double alpha);

/// Components of the part of the mesh in {<normal, p> > offset}.
int count_components_above(const TriMeshd& mesh, const Vec3& normal, double offset);

/// Columns t, component_id, point_index, x, z, exit_start, exit_end.
void write_slices_csv(std::ostream& out, const std::vector<SliceSet>& slices);
void write_slice_svg(std::ostream& out, const SliceSet& slice);

}  // namespace tslab
