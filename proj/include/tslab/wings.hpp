#pragma once

#include "tslab/slicing.hpp"

#include <string>
#include <vector>

namespace tslab {

class WingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class WingType { planar, grim_reaper };
std::string to_string(WingType t);

/// TOP/TOP is a grim reaper wing, TOP/BOTTOM planar. Throws WingError on
/// BOTTOM/BOTTOM and on SIDE or CLOSED ends.
WingType classify_wing(const Polyline& line);

struct WingCount {
  int omega = 0, omega_P = 0, omega_G = 0;
  int slice_components = 0;
  int unclassified = 0;
  int lambda() const { return omega_P + 2 * omega_G; }
};

struct CensusRow {
  double t;  // signed slice offset
  int mu;    // components of the part beyond the offset
  int slices;
};

struct WingReport {
  double t_stable = 0;
  WingCount plus, minus;
  std::vector<CensusRow> trace;  // minus side then plus side, by increasing |t|
  bool monotone = true;          // mu non-decreasing in |t| on both sides
  bool slices_match = true;      // slice components at t_stable equal omega on both sides
  std::vector<std::string> flags;
};

/// Scans offsets t_min, t_min + step, ... up to t_max on both sides of y = 0.
/// Per side, t_stable is the start of the final constant run of mu (at least
/// 3 offsets); the report uses the larger of the two sides. Throws WingError
/// with the count trace when either side has no such run or fewer than 5
/// offsets inside the mesh's y-range.
WingReport wing_census(const TriMeshd& mesh, double t_min, double t_max, double step);

struct LambdaVerdict {
  int lambda = 0, lambda_plus = 0, lambda_minus = 0;
  bool consistent = true;
  std::vector<std::string> failures;
};
LambdaVerdict lambda_from_wings(const WingReport& report);

struct Cluster {
  double x;  // mean of the member component means
  int members;
};
struct HorizontalProfile {
  double z;
  std::vector<double> component_x;  // mean x per component, sorted
  std::vector<Cluster> clusters;
};
/// Slices at height z and clusters component mean x-values with gap 4h
/// (h = 0: median edge length).
HorizontalProfile horizontal_slice_profile(const TriMeshd& mesh, double z, double h = 0);

struct SpineCheck {
  std::vector<Vec3> spine;     // z-minimizing point per offset
  std::vector<double> normal_x;  // <N, e1> at each spine point
  double max_normal_x = 0;
  int lines_sampled = 0, lines_bad = 0;
  int split_bad = 0;  // offsets where the spine does not split the slice into two x-monotone arcs
  bool ok() const { return max_normal_x <= 0.05 && lines_bad == 0 && split_bad == 0; }
};

/// Minimal axis of the grim reaper wing that crosses the offsets ts on the
/// side of sign(ts). The wing slice at each offset is the TOP/TOP polyline
/// nearest in mean x to x_hint. Samples `lines` horizontal lines {y = t, z = c}
/// through the wing (seeded) and counts their transversal intersections.
SpineCheck wing_spine(const TriMeshd& mesh, const std::vector<double>& ts, double x_hint = 0, int lines = 100,
                      unsigned seed = 1);

/// Components of the slice by the vertical plane through (0, y0) at angle alpha.
int skew_slice_components(const TriMeshd& mesh, double y0, double alpha);

}  // namespace tslab
