#pragma once

#include "tslab/mesh.hpp"

#include <map>
#include <string>
#include <vector>

namespace tslab {

class FamilyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Tilted grim reaper G_zeta: z = -log cos(x cos zeta) / cos^2 zeta - y tan zeta.
struct GrimReaperParams {
  double zeta = 0;
  double h = 0.05;         // arclength spacing across the profile
  double h_ruling = 0;     // spacing along y; 0 means h
  double y_extent = 10;    // |y| <= y_extent
  double z_cap = 8;        // profile height at which the strip is trimmed
  double growth = 0;       // spacing grows as h (1 + growth s) ...
  double h_max = 0;        // ... up to h_max (0 means no growth)
};

double grim_reaper_height(double zeta, double x, double y);
/// Half-width pi / (2 |cos zeta|) of the strip carrying G_zeta.
double grim_reaper_half_width(double zeta);
TriMeshd grim_reaper(const GrimReaperParams& p);

/// Radial profile of the bowl soliton, f'' / (1 + f'^2) + f' / r = 1.
struct BowlProfile {
  std::vector<double> r, f, fp;
  /// Cubic Hermite interpolation of the tabulated solution.
  double value(double r) const;
  double slope(double r) const;
  /// f'' recovered from the ODE.
  double curvature(double r) const;
};

struct Bowl {
  TriMeshd mesh;
  BowlProfile profile;
};

/// Adaptive Dormand-Prince integration from the series start at r = 1e-3,
/// tabulated every `table_step`.
BowlProfile bowl_profile(double r_max, double tol = 1e-13, double table_step = 0.005);
/// Graph of the profile over the Cartesian grid cells inside the disk r <= r_max.
Bowl bowl(double r_max, double h);

/// Rectangle in {x = x0}, |y| <= y_extent, |z| <= z_extent, normal +e1.
TriMeshd vertical_plane(double x0, double y_extent, double z_extent, double h);
/// Cylinder of the given radius about the z-axis, |z| <= z_extent, outward normal.
TriMeshd cylinder(double radius, double z_extent, double h, double angular_step);

enum class FamilyTag { plane, grim_reaper, bowl, shrinker_cylinder };

struct FamilySpec {
  FamilyTag tag = FamilyTag::grim_reaper;
  double zeta = 0;
  double x0 = 0;
  double r_max = 10;
  double radius = 1.4142135623730951;
  double h = 0.05;
  double h_ruling = 0;
  double y_extent = 10;
  double z_extent = 12;  // plane/cylinder half-height, grim reaper z_cap
  double angular_step = 0.01;

  /// Throws FamilyError on invalid parameters.
  void validate() const;
};

FamilyTag parse_family_tag(const std::string& name);
std::string to_string(FamilyTag tag);
TriMeshd make_family(const FamilySpec& spec);

/// Plane or shrinker cylinder used to calibrate the entropy functional.
TriMeshd calibration_surface(FamilyTag tag, const std::map<std::string, double>& params, double h);

}  // namespace tslab
