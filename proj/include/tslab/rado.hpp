#pragma once

#include "tslab/slicing.hpp"

#include <string>
#include <vector>

namespace tslab {

class RadoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CriticalVertex {
  int vertex;
  int multiplicity;
};

/// Critical points of f(p) = <p, nu> over interior vertices. A vertex whose
/// link changes sign 2n >= 4 times is a saddle of multiplicity n - 1; local
/// extrema (no sign change) are listed separately and not counted in N.
struct RadoReport {
  Vec3 nu = Vec3::UnitY();
  bool perturbed = false;  // some link value vanished and was decided by the tilt
  std::vector<CriticalVertex> critical;
  std::vector<int> extrema;
  int N = 0;
};

/// Link ties are broken symbolically, as if nu were tilted by an infinitesimal
/// generic amount. Zero-length link edges throw.
RadoReport rado_critical_points(const TriMeshd& mesh, const Vec3& nu);

struct HPolyline {
  std::vector<Vec3> pts;
  std::vector<Vec3> normals;  // vertex normals interpolated along the edge
  std::vector<EdgePoint> at;
  bool closed = false;
  bool ends_on_boundary(const TriMeshd& mesh) const;
};

struct HSet {
  bool identically_zero = false;
  int anomalies = 0;  // isolated sign flips absorbed into their neighbourhood
  Eigen::VectorXd field;  // per-vertex values whose zero set was taken
  std::vector<HPolyline> lines;
  std::size_t size() const;
};

/// Field whose zero set is extracted: the cotangent mean curvature, or
/// -<e3, N>, which equals H on a translator.
enum class HSource { mean_curvature, translator };
std::string to_string(HSource s);
HSource parse_h_source(const std::string& s);

/// Zero set of H. Needs differential quantities. With the cotangent source,
/// boundary vertices take the mean of their interior neighbours. |H| <= flat_tol everywhere
/// yields identically_zero with no lines.
HSet h_zero_set(const TriMeshd& mesh, HSource source = HSource::mean_curvature, double flat_tol = 1e-9);

struct EquatorArc {
  double lo, hi;  // azimuths, lo <= hi, hi may exceed pi after wrap-around
  double lo_to_axis, hi_to_axis;  // angular distance to the nearest of +-e1
  double length() const { return hi - lo; }
};

/// Each path of normals along a connected curve covers the azimuth range of its
/// continuous lift; ranges are merged into arcs where they come within gap.
std::vector<EquatorArc> equator_arcs(const std::vector<std::vector<Vec3>>& paths, double gap = 0.05);
std::vector<EquatorArc> gauss_equator_image(const HSet& hset, double gap = 0.05);
void write_equator_svg(std::ostream& out, const std::vector<EquatorArc>& arcs);

/// Clusters of adjacent faces whose vertex normals span a spherical triangle
/// containing nu. nu must be horizontal and at least 0.05 rad from +-e1.
int normal_preimage_count(const TriMeshd& mesh, const Vec3& nu);

struct TangentSplit {
  int total = 0, positive = 0, negative = 0;
};

/// Components of the mesh after removing faces within h of the vertical plane
/// through q with horizontal normal n (h = 0: median edge length). Throws when
/// q is within 3h of the boundary.
TangentSplit tangent_plane_components(const TriMeshd& mesh, const Vec3& q, const Vec3& n, double h = 0);

}  // namespace tslab
