#include "tslab/pitchfork.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <tuple>

namespace tslab {

namespace {

constexpr double kPi = std::numbers::pi;

using DataFn = std::function<double(double a, double b, double m)>;

void apply_data(HeightField& f, const DataFn& data, double m) {
  for (Eigen::Index i = 0; i < f.na(); ++i)
    for (Eigen::Index j = 0; j < f.nb(); ++j)
      if (f.dirichlet(i, j)) f.u(i, j) = data(f.a(i), f.b(j), m);
}

/// Solve at cap M; on failure, continue in M from 4 upward on the same grid.
std::pair<HeightField, SolveReport> capped_solve(HeightField f, const DataFn& data, double M, const SolveOptions& opt,
                                                 std::vector<std::string>& warnings, bool direct = true) {
  if (direct) {
    apply_data(f, data, M);
    auto [sol, rep] = solve_dirichlet(f, opt);
    if (rep.converged) return {std::move(sol), rep};
    warnings.push_back("direct solve failed (" + rep.message + "); continuing in M");
  }
  HeightField cur = std::move(f);
  SolveOptions warm = opt;
  SolveReport last;
  bool first = true;
  int total = 0;
  for (double m = std::min(4.0, M);; m = std::min(M, m + 2)) {
    apply_data(cur, data, m);
    warm.harmonic_start = first;
    first = false;
    auto [s, r] = solve_dirichlet(cur, warm);
    total += r.iterations;
    last = r;
    if (!r.converged) {
      last.message = "continuation failed at M = " + std::to_string(m) + ": " + r.message;
      return {std::move(s), last};
    }
    cur = std::move(s);
    if (m >= M) break;
  }
  last.iterations = total;
  return {std::move(cur), last};
}

/// Re-solves with cap M + 2 after moving the two a-walls out to the M + 2
/// trim; all interior nodes are shared, so the comparison is nodewise. The
/// solutions are compared modulo the constant that best aligns the core.
void certify(CappedSolve& out, const DataFn& data, const CapOptions& opt, std::pair<double, double> walls,
             std::array<double, 4> core) {
  CapCertificate& c = out.certificate;
  c.computed = true;
  c.M_check = out.M + 2;
  c.core = core;
  HeightField g = out.field;
  g.a(0) = walls.first;
  g.a(g.na() - 1) = walls.second;
  SolveOptions warm = opt.solve;
  warm.harmonic_start = false;
  std::vector<std::string> ignored;
  auto [chk, rc] = capped_solve(g, data, c.M_check, warm, ignored);
  if (!rc.converged) {
    out.warnings.push_back("certificate solve at M + 2 did not converge: " + rc.message);
    return;
  }
  const HeightField& f = out.field;
  const Eigen::MatrixXd d = chk.u - f.u;
  auto in_core = [&](Eigen::Index i, Eigen::Index j) {
    return !f.dirichlet(i, j) && f.a(i) >= core[0] && f.a(i) <= core[1] && f.b(j) >= core[2] && f.b(j) <= core[3];
  };
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (Eigen::Index i = 0; i < f.na(); ++i)
    for (Eigen::Index j = 0; j < f.nb(); ++j)
      if (in_core(i, j)) {
        lo = std::min(lo, d(i, j));
        hi = std::max(hi, d(i, j));
      }
  c.gauge_shift = hi >= lo ? 0.5 * (lo + hi) : 0.0;
  c.diff = (d.array() - c.gauge_shift).abs().matrix();
  c.stable.resize(f.na(), f.nb());
  long stable = 0, total = 0;
  for (Eigen::Index i = 0; i < f.na(); ++i)
    for (Eigen::Index j = 0; j < f.nb(); ++j) {
      const bool free = !f.dirichlet(i, j);
      c.stable(i, j) = free && c.diff(i, j) <= opt.certify_tol;
      total += free;
      stable += c.stable(i, j);
      if (in_core(i, j)) c.core_max_diff = std::max(c.core_max_diff, c.diff(i, j));
    }
  c.stable_fraction = total ? double(stable) / double(total) : 0.0;
  c.certified = c.core_max_diff <= opt.certify_tol;
  if (c.core_max_diff > opt.warn_tol)
    out.warnings.push_back("M-sensitivity " + std::to_string(c.core_max_diff) + " in the checked region");
}

double wall_ratio(double h, const CapOptions& opt) {
  return opt.wall_ratio > 0 ? opt.wall_ratio : std::max(0.8, 1 - h / 4);
}

/// Levels needed for the wall spacing to come down to about delta.
int wall_levels(double h, double delta, const CapOptions& opt) {
  if (!opt.wall_grading) return 0;
  const int need = int(std::ceil(std::log(delta / h) / std::log(wall_ratio(h, opt))));
  return std::clamp(need, 0, opt.max_wall_levels);
}

/// Nodes on [lo, hi] graded toward each wall with its own number of levels.
Eigen::VectorXd wall_graded(double lo, double hi, double h, double ratio, int levels_lo, int levels_hi) {
  const double mid = 0.5 * (lo + hi);
  const Eigen::VectorXd left = graded_nodes(lo, mid, h, {lo}, ratio, levels_lo);
  const Eigen::VectorXd right = graded_nodes(mid, hi, h, {hi}, ratio, levels_hi);
  Eigen::VectorXd nodes(left.size() + right.size() - 1);
  nodes << left, right.tail(right.size() - 1);
  return nodes;
}

}  // namespace

double capped_profile(double a, double width, double lift, double M) {
  const double c = kPi / width;
  const double cs = std::cos(a * c);
  if (cs <= 0) return M;
  return std::min(M, -std::log(cs) / (c * c) + lift);
}

double delta_wing_trim(double w, double M) {
  const double c = kPi / (2 * w);
  return w - std::acos(std::exp(-M * c * c)) / c;
}

CappedSolve delta_wing(double w, double L, double h, const CapOptions& opt) {
  if (!(w > kPi / 2)) throw std::invalid_argument("delta_wing: w must exceed pi/2");
  if (!(L >= 4 * w)) throw std::invalid_argument("delta_wing: L must be at least 4w");
  const double M = opt.M;
  const double delta = delta_wing_trim(w, M), outer = delta_wing_trim(w, M + 2);
  const double tan_zeta = std::tan(std::acos(kPi / (2 * w)));

  const double lo = -w + delta, hi = w - delta;
  const DataFn data = [=](double a, double, double m) {
    if (a <= lo || a >= hi) return m;
    return capped_profile(a, 2 * w, L * tan_zeta, m);
  };
  const int levels = wall_levels(h, delta, opt);
  CappedSolve out;
  out.M = M;
  HeightField f(GraphDirection::vertical(), wall_graded(lo, hi, h, wall_ratio(h, opt), levels, levels),
                uniform_nodes(-L, L, h), h);
  std::tie(out.field, out.report) = capped_solve(std::move(f), data, M, opt.solve, out.warnings, !opt.continuation);
  if (out.report.converged && opt.certify)
    certify(out, data, opt, {-w + outer, w - outer}, {-w / 2, w / 2, -L / 2, L / 2});
  out.delta = delta;
  return out;
}

double pitchfork_trim(double w, double M) {
  const double c = kPi / w;
  return w / 2 - std::acos(std::exp(-M * c * c)) / c;
}

double pitchfork_far_profile(double a, double w, double delta, double M) {
  // Arc s0 - log cos(a - c0) reaching M at a = w - delta; its mirror reaches M at a = delta.
  double eps = 0;
  for (int k = 0; k < 60; ++k) eps = std::asin(std::sin(2 * delta - eps) * std::exp(-2 * M));
  const double c0 = kPi / 2 - delta + eps + (w - kPi);
  const double s0 = -M + std::log(std::sin(2 * delta - eps));
  if (a <= c0) return -M;
  const double x = a - c0;
  if (x >= kPi / 2) return M;
  return std::clamp(s0 - std::log(std::cos(x)), -M, M);
}

CappedSolve pitchfork_piece(double w, double L, double h, const CapOptions& opt) {
  if (!(w >= kPi - 1e-12)) throw std::invalid_argument("pitchfork_piece: w must be at least pi");
  if (!(L >= 6 * w - 1e-12)) throw std::invalid_argument("pitchfork_piece: L must be at least 6w");
  const double M = opt.M;
  const double delta = pitchfork_trim(w, M), outer = pitchfork_trim(w, M + 2);
  const double tan_zeta = std::tan(std::acos(kPi / w));
  const double ramp = h;

  const double lo = delta, hi = w - delta;
  const DataFn data = [=](double a, double b, double m) {
    if (a <= lo) {
      if (b <= -ramp) return -m;
      if (b >= ramp) return m;
      return m * b / ramp;
    }
    if (a >= hi) return m;
    if (b > 0) return capped_profile(a - w / 2, w, L * tan_zeta, m);
    return pitchfork_far_profile(a, w, lo, m);
  };
  CappedSolve out;
  out.M = M;
  HeightField f(GraphDirection::vertical(),
                wall_graded(lo, hi, h, opt.grading_ratio, opt.grading_levels, opt.grading_levels),
                graded_nodes(-L, L, h, {0.0}, opt.grading_ratio, opt.grading_levels,
                             opt.grading_core > 0 ? opt.grading_core : h),
                h);
  std::tie(out.field, out.report) = capped_solve(std::move(f), data, M, opt.solve, out.warnings, !opt.continuation);
  const double margin = std::max(1.0, w / 4);
  if (out.report.converged && opt.certify)
    certify(out, data, opt, {outer, w - outer}, {margin, w - margin, 0.0, L / 2});
  out.delta = delta;
  out.ramp_halfwidth = ramp;
  return out;
}

DoubledSurface reflect_double(const HeightField& piece, double ramp_halfwidth) {
  if (piece.dir.c != 0 || piece.dir.s != 1) throw StitchError("reflect_double: piece must be a vertical graph");
  const Eigen::Index na = piece.na(), nb = piece.nb();
  const Eigen::Index n = na * nb;
  const double tol = 1e-9 * ramp_halfwidth;

  DoubledSurface out;
  out.piece_vertices = n;
  std::vector<bool> on_axis(n, false);
  Vec3 gap_at = Vec3::Zero();
  for (Eigen::Index j = 0; j < nb; ++j)
    if (std::abs(piece.b(j)) <= ramp_halfwidth + tol) {
      on_axis[j] = true;  // node (0, j)
      const Vec3 p = piece.point(0, j);
      if (2 * std::hypot(p.x(), p.y()) > out.max_gap) {
        out.max_gap = 2 * std::hypot(p.x(), p.y());
        gap_at = p;
      }
    }
  if (out.max_gap > 2 * ramp_halfwidth * (1 + 1e-6) + 1e-12)
    throw StitchError("reflect_double: stitching gap " + std::to_string(out.max_gap) + " exceeds 2h at (" +
                      std::to_string(gap_at.x()) + ", " + std::to_string(gap_at.y()) + ", " +
                      std::to_string(gap_at.z()) + ")");

  std::vector<int> copy_index(n, -1);
  int next = int(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    if (on_axis[k]) {
      copy_index[k] = int(k);
      ++out.strip_vertices;
    } else {
      copy_index[k] = next++;
    }
  }
  if (out.strip_vertices < 2) throw StitchError("reflect_double: no ramp nodes on the axis wall");

  VertexMatrix<double> V(next, 3);
  for (Eigen::Index i = 0; i < na; ++i)
    for (Eigen::Index j = 0; j < nb; ++j) {
      const Eigen::Index k = i * nb + j;
      Vec3 p = piece.point(i, j);
      if (on_axis[k]) p.head<2>().setZero();
      V.row(k) = p.transpose();
      if (!on_axis[k]) V.row(copy_index[k]) << -p.x(), -p.y(), p.z();
    }

  const TriMeshd base = height_field_mesh(piece);
  const FaceMatrix& Fp = base.faces();
  FaceMatrix F(2 * Fp.rows(), 3);
  for (Eigen::Index f = 0; f < Fp.rows(); ++f) {
    F.row(f) = Fp.row(f);
    F.row(Fp.rows() + f) << copy_index[Fp(f, 0)], copy_index[Fp(f, 2)], copy_index[Fp(f, 1)];
  }
  for (Eigen::Index j = 0; j < nb; ++j)
    if (on_axis[j]) out.axis.push_back(int(j));
  out.mesh = TriMeshd(std::move(V), std::move(F));
  return out;
}

}  // namespace tslab
