#pragma once

#include "tslab/pde.hpp"

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

namespace tslab {

/// Solves with boundary data capped at +-M on a domain trimmed where the
/// one-dimensional profile reaches M, then re-solves with cap M + 2 after moving
/// the two capped walls out to the M + 2 trim, and compares node by node up to
/// a vertical shift.
struct CapOptions {
  double M = 12;
  double grading_ratio = 0.8;
  int grading_levels = 13;    // pitchfork: toward both walls and toward b = 0
  double grading_core = 0;   // uniform core around the pitchfork ramp; 0 means h
  SolveOptions solve;
  bool continuation = false;  // go straight to continuation in M from 4
  bool certify = true;
  double certify_tol = 1e-4;
  double warn_tol = 1e-3;
  bool wall_grading = true;  // delta-wing: refine toward the capped walls down to about delta
  double wall_ratio = 0;     // delta-wing wall grading ratio; 0 means max(0.8, 1 - h / 4)
  int max_wall_levels = 4000;
};

struct CapCertificate {
  bool computed = false;
  double M_check = 0;
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> stable;  // diff <= certify_tol
  Eigen::MatrixXd diff;  // |u_{M+2} - u_M - gauge_shift| per node
  double gauge_shift = 0;  // midrange of u_{M+2} - u_M over the core
  std::array<double, 4> core{};  // a0, a1, b0, b1 of the checked interior region
  double core_max_diff = 0;
  double stable_fraction = 0;
  bool certified = false;
};

struct CappedSolve {
  HeightField field;
  SolveReport report;
  double M = 0;
  double delta = 0;
  double ramp_halfwidth = 0;  // pitchfork only
  CapCertificate certificate;
  std::vector<std::string> warnings;
};

/// Grim reaper profile of width `width`, centered at 0, at height offset `lift`
/// and capped at M: min(M, -log cos(a c) / c^2 + lift), c = pi / width.
double capped_profile(double a, double width, double lift, double M);

/// Distance from the walls at which the one-dimensional profile reaches M.
double delta_wing_trim(double w, double M);
double pitchfork_trim(double w, double M);

/// Delta-wing over (-w + delta, w - delta) x (-L, L), theta = pi/2.
CappedSolve delta_wing(double w, double L, double h, const CapOptions& opt = {});

/// Pitchfork piece over (delta, w - delta) x (-L, L): -M / +M on the axis wall
/// for b < 0 / b > 0 with a linear ramp over |b| <= h, +M on a = w - delta,
/// one-dimensional translator profiles on b = +-L.
CappedSolve pitchfork_piece(double w, double L, double h, const CapOptions& opt = {});

/// Clamped grim reaper arc through (delta, -M) and (pi - delta, M), shifted
/// right by w - pi. Left of its vertex the value is -M.
double pitchfork_far_profile(double a, double w, double delta, double M);

class StitchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DoubledSurface {
  TriMeshd mesh;
  Eigen::Index piece_vertices = 0;
  Eigen::Index strip_vertices = 0;  // shared axis vertices
  std::vector<int> axis;            // shared vertices ordered by height
  double max_gap = 0;
};

/// The piece united with its image under (x, y, z) -> (-x, -y, z). Wall nodes
/// on the ramp |b| <= ramp_halfwidth are moved onto the z-axis and shared; the
/// copy's winding is reversed so the union is consistently oriented.
DoubledSurface reflect_double(const HeightField& piece, double ramp_halfwidth);

}  // namespace tslab
