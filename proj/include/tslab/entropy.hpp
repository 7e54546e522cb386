#pragma once

#include "tslab/mesh.hpp"

#include <limits>
#include <vector>

namespace tslab {

class EntropyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EntropyResult {
  Vec3 x0 = Vec3::Zero();
  double s0 = 1;
  double F = 0;
  double truncation_radius = std::numeric_limits<double>::infinity();
  double tail_bound = 0;  // infinite when truncation_radius <= 4 sqrt(s0)
  long evaluations = 0;

  double lambda_hat() const { return F; }
  bool tail_valid() const { return tail_bound < std::numeric_limits<double>::infinity(); }
};

struct EntropyProbe {
  Vec3 x0;
  double s0;
  double F;
  bool lumped = false;  // coarse scan value
};

struct SearchOptions {
  Eigen::AlignedBox3d box;  // empty: mesh bounding box inflated by sqrt(s_max)
  double s_min = 0.25;
  double s_max = 256;
  int grid = 9;     // points per axis
  int scales = 12;  // log-spaced
  int max_simplex_iter = 400;
  double simplex_tol = 1e-10;
  int refine = 16;
};

/// Gaussian density (1 / 4 pi s0) sum_f exp(-|c_f - x0|^2 / 4 s0) |f| with
/// centroid quadrature; faces wider than sqrt(s0) / 4 are split 4-way until
/// they are not.
class GaussianDensity {
 public:
  explicit GaussianDensity(const TriMeshd& mesh);
  double operator()(const Vec3& x0, double s0, bool parallel = true) const;
  /// Faces lumped into area-weighted point masses on cells of extent at most
  /// sqrt(s0) / 4; used for the coarse scan at scales >= s0.
  GaussianDensity coarsened(double s0) const;
  const Eigen::AlignedBox3d& bounds() const { return bounds_; }
  Eigen::Index num_faces() const { return Eigen::Index(area_.size()); }

 private:
  GaussianDensity() = default;
  void build_buckets();
  std::vector<int> candidates(const Vec3& x0, double radius) const;
  double face_term(int f, const Vec3& x0, double s0) const;

  std::vector<Vec3> a_, b_, c_, centroid_;
  std::vector<double> area_, diam_;
  double max_diam_ = 0;
  bool lumped_ = false;
  Eigen::AlignedBox3d bounds_;
  double cell_ = 1;
  Eigen::Vector3i dims_ = Eigen::Vector3i::Ones();
  std::vector<int> cell_start_, cell_faces_;
};

double f_functional(const TriMeshd& mesh, const Vec3& x0, double s0);

/// Grid scan over the box and the log-spaced scales with the lumped density,
/// exact re-evaluation of the best `refine` grid points, then Nelder-Mead in
/// (x0, log s0) from the best of those. Grid ties go to the smaller s0, then
/// to the lexicographically smaller x0. The optional trace receives every
/// probe in evaluation order.
EntropyResult entropy_sup(const TriMeshd& mesh, const SearchOptions& opt = {},
                          std::vector<EntropyProbe>* trace = nullptr);

/// F_{0,1} of p -> p / sqrt(t) - sqrt(t) e3, evaluated as F_{t e3, t}. The mesh
/// must reach z = 2t.
double rescaled_f(const TriMeshd& mesh, double t);
/// Largest t accepted by rescaled_f.
double max_rescale_time(const TriMeshd& mesh);

/// Bound on the density of the surface beyond radius R from x0, assuming the
/// shell-area growth measured on the mesh inside R persists. Requires R > 4 sqrt(s0).
double tail_bound(const TriMeshd& mesh, double R, const Vec3& x0, double s0);
/// Distance from x0 to the nearest boundary vertex; infinite for closed meshes.
double truncation_radius(const TriMeshd& mesh, const Vec3& x0);

Eigen::AlignedBox3d bounding_box(const TriMeshd& mesh);

}  // namespace tslab
