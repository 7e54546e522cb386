#pragma once

#include "tslab/height_field.hpp"

#include <Eigen/SparseCore>

#include <array>
#include <string>
#include <vector>

namespace tslab {

/// Nine-point flux-form discretization of
///   div(grad u / W) - (sin theta - cos theta u_b) / W,  W = sqrt(1 + |grad u|^2)
/// at node (i, j) of a tensor grid. Fluxes live on cell-face midpoints; the
/// tangential derivative there is the mean of the two nodal 3-point derivatives.
struct Stencil {
  double ha_m, ha_p, hb_m, hb_p;  // grid steps around the node
  std::array<double, 3> alpha, beta;  // 3-point first-derivative weights in a and b

  static Stencil at(const HeightField& f, Eigen::Index i, Eigen::Index j);
  /// Residual for the 3x3 patch U[m][n] ~ u(i - 1 + m, j - 1 + n).
  double residual(const double (&U)[3][3], double s, double c) const;
  /// Residual and its gradient with respect to the patch values.
  double linearize(const double (&U)[3][3], double s, double c, double (&dR)[3][3]) const;
};

/// Per-node residual; zero at Dirichlet nodes.
Eigen::MatrixXd pde_residual(const HeightField& f);
double pde_residual_at(const HeightField& f, Eigen::Index i, Eigen::Index j);
/// Max |residual| over the free nodes.
double max_free_residual(const HeightField& f);

/// Residual vector and analytic Jacobian over the free (non-Dirichlet) nodes.
struct Linearization {
  std::vector<Eigen::Index> free_nodes;  // i * nb + j
  Eigen::VectorXd residual;
  Eigen::SparseMatrix<double> jacobian;
};
Linearization linearize(const HeightField& f);

/// Discrete Laplace interpolation of the Dirichlet data into the free nodes.
HeightField harmonic_interpolation(HeightField f);

struct SolveOptions {
  double tol = 1e-10;
  int max_iter = 200;
  int max_halvings = 20;
  bool harmonic_start = true;  // otherwise the field's free values are the initial guess
  double pseudo_time_shift = 1;  // initial sigma when the line search fails
  double floor_factor = 64;    // per-node round-off floor: factor * eps * (1 + |u|) / h^2
  double barrier_slack = 1;    // iterates of vertical graphs are kept above the barrier minus this
};

struct SolveReport {
  int iterations = 0;
  double residual = 0;   // max over free nodes
  double scaled_residual = 0;  // max over free nodes of |R| / max(tol, round-off floor)
  std::vector<double> damping;  // 0 marks a rejected step
  std::vector<double> shift;    // pseudo-time sigma per step, 0 for plain Newton
  std::vector<double> history;  // max residual after each accepted step
  bool converged = false;
  bool regularized = false;
  std::string message;
};

/// Pointwise lower bound for a vertical graph at the given free nodes: the
/// highest tilted grim reaper (several widths, both tilts, both directions)
/// lying below the Dirichlet data.
Eigen::VectorXd lower_barrier(const HeightField& f, const std::vector<Eigen::Index>& free_nodes);

/// Damped Newton with the analytic Jacobian. The step is halved until the
/// area-weighted residual 2-norm decreases. If halving fails, the step is
/// recomputed with the pseudo-time shift J - sigma diag|J| until the merit
/// drops, and sigma decays back to zero as it does. Converged means every free node
/// has |R| at most tol, or its round-off floor when that is larger.
std::pair<HeightField, SolveReport> solve_dirichlet(HeightField f, const SolveOptions& opt = {});

}  // namespace tslab
