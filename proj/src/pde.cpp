#include "tslab/pde.hpp"

#include <Eigen/SparseLU>

#include <cmath>
#include <limits>
#include <numbers>
#include <algorithm>
#include <stdexcept>

namespace tslab {

namespace {

std::array<double, 3> derivative_weights(double hm, double hp) {
  return {-hp / (hm * (hm + hp)), (hp - hm) / (hm * hp), hm / (hp * (hm + hp))};
}

void gather(const HeightField& f, Eigen::Index i, Eigen::Index j, double (&U)[3][3]) {
  for (int m = 0; m < 3; ++m)
    for (int n = 0; n < 3; ++n) U[m][n] = f.u(i - 1 + m, j - 1 + n);
}

}  // namespace

Stencil Stencil::at(const HeightField& f, Eigen::Index i, Eigen::Index j) {
  Stencil s;
  s.ha_m = f.a(i) - f.a(i - 1);
  s.ha_p = f.a(i + 1) - f.a(i);
  s.hb_m = f.b(j) - f.b(j - 1);
  s.hb_p = f.b(j + 1) - f.b(j);
  s.alpha = derivative_weights(s.ha_m, s.ha_p);
  s.beta = derivative_weights(s.hb_m, s.hb_p);
  return s;
}

double Stencil::residual(const double (&U)[3][3], double s, double c) const {
  double dR[3][3];
  return linearize(U, s, c, dR);
}

double Stencil::linearize(const double (&U)[3][3], double s, double c, double (&dR)[3][3]) const {
  for (auto& row : dR)
    for (double& x : row) x = 0;
  auto Db = [&](int m) { return beta[0] * U[m][0] + beta[1] * U[m][1] + beta[2] * U[m][2]; };
  auto Da = [&](int n) { return alpha[0] * U[0][n] + alpha[1] * U[1][n] + alpha[2] * U[2][n]; };
  const double Ca = 2 / (ha_m + ha_p), Cb = 2 / (hb_m + hb_p);

  // a-fluxes p / W through the east and west faces.
  for (int side = 0; side < 2; ++side) {
    const int m0 = side == 0 ? 1 : 0;  // face between rows m0 and m0 + 1
    const double ha = side == 0 ? ha_p : ha_m;
    const double sign = side == 0 ? Ca : -Ca;
    const double p = (U[m0 + 1][1] - U[m0][1]) / ha;
    const double q = 0.5 * (Db(m0) + Db(m0 + 1));
    const double W = std::sqrt(1 + p * p + q * q), W3 = W * W * W;
    const double Fp = (1 + q * q) / W3, Fq = -p * q / W3;
    dR[m0 + 1][1] += sign * Fp / ha;
    dR[m0][1] -= sign * Fp / ha;
    for (int n = 0; n < 3; ++n) {
      dR[m0][n] += sign * Fq * 0.5 * beta[n];
      dR[m0 + 1][n] += sign * Fq * 0.5 * beta[n];
    }
  }
  // b-fluxes q / W through the north and south faces.
  for (int side = 0; side < 2; ++side) {
    const int n0 = side == 0 ? 1 : 0;
    const double hb = side == 0 ? hb_p : hb_m;
    const double sign = side == 0 ? Cb : -Cb;
    const double q = (U[1][n0 + 1] - U[1][n0]) / hb;
    const double p = 0.5 * (Da(n0) + Da(n0 + 1));
    const double W = std::sqrt(1 + p * p + q * q), W3 = W * W * W;
    const double Gq = (1 + p * p) / W3, Gp = -p * q / W3;
    dR[1][n0 + 1] += sign * Gq / hb;
    dR[1][n0] -= sign * Gq / hb;
    for (int m = 0; m < 3; ++m) {
      dR[m][n0] += sign * Gp * 0.5 * alpha[m];
      dR[m][n0 + 1] += sign * Gp * 0.5 * alpha[m];
    }
  }

  // Divergence, evaluated in the same order as the linearization above.
  double div = 0;
  {
    const double pe = (U[2][1] - U[1][1]) / ha_p, qe = 0.5 * (Db(1) + Db(2));
    const double pw = (U[1][1] - U[0][1]) / ha_m, qw = 0.5 * (Db(0) + Db(1));
    const double qn = (U[1][2] - U[1][1]) / hb_p, pn = 0.5 * (Da(1) + Da(2));
    const double qs = (U[1][1] - U[1][0]) / hb_m, ps = 0.5 * (Da(0) + Da(1));
    div = Ca * (pe / std::sqrt(1 + pe * pe + qe * qe) - pw / std::sqrt(1 + pw * pw + qw * qw)) +
          Cb * (qn / std::sqrt(1 + pn * pn + qn * qn) - qs / std::sqrt(1 + ps * ps + qs * qs));
  }

  const double ua = Da(1), ub = Db(1);
  const double Wn = std::sqrt(1 + ua * ua + ub * ub), Wn3 = Wn * Wn * Wn;
  const double num = s - c * ub;
  const double rhs = num / Wn;
  const double g_ua = -num * ua / Wn3;
  const double g_ub = -c / Wn - num * ub / Wn3;
  for (int k = 0; k < 3; ++k) {
    dR[k][1] -= g_ua * alpha[k];
    dR[1][k] -= g_ub * beta[k];
  }
  return div - rhs;
}

double pde_residual_at(const HeightField& f, Eigen::Index i, Eigen::Index j) {
  if (f.on_grid_boundary(i, j)) throw std::invalid_argument("pde_residual_at: node lacks a full stencil");
  double U[3][3];
  gather(f, i, j, U);
  return Stencil::at(f, i, j).residual(U, f.dir.s, f.dir.c);
}

Eigen::MatrixXd pde_residual(const HeightField& f) {
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(f.na(), f.nb());
  for (Eigen::Index i = 1; i + 1 < f.na(); ++i)
    for (Eigen::Index j = 1; j + 1 < f.nb(); ++j)
      if (!f.dirichlet(i, j)) R(i, j) = pde_residual_at(f, i, j);
  return R;
}

double max_free_residual(const HeightField& f) { return pde_residual(f).cwiseAbs().maxCoeff(); }

Linearization linearize(const HeightField& f) {
  Linearization L;
  const Eigen::Index nb = f.nb();
  std::vector<int> index(f.na() * nb, -1);
  for (Eigen::Index i = 0; i < f.na(); ++i)
    for (Eigen::Index j = 0; j < nb; ++j)
      if (!f.dirichlet(i, j)) {
        if (f.on_grid_boundary(i, j)) throw std::invalid_argument("linearize: free node on the grid boundary");
        index[i * nb + j] = int(L.free_nodes.size());
        L.free_nodes.push_back(i * nb + j);
      }
  const Eigen::Index n = Eigen::Index(L.free_nodes.size());
  L.residual.resize(n);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(std::size_t(n) * 9);
  for (Eigen::Index r = 0; r < n; ++r) {
    const Eigen::Index i = L.free_nodes[r] / nb, j = L.free_nodes[r] % nb;
    double U[3][3], dR[3][3];
    gather(f, i, j, U);
    L.residual(r) = Stencil::at(f, i, j).linearize(U, f.dir.s, f.dir.c, dR);
    for (int m = 0; m < 3; ++m)
      for (int k = 0; k < 3; ++k) {
        const int col = index[(i - 1 + m) * nb + (j - 1 + k)];
        if (col >= 0) trip.emplace_back(int(r), col, dR[m][k]);
      }
  }
  L.jacobian.resize(n, n);
  L.jacobian.setFromTriplets(trip.begin(), trip.end());
  return L;
}

HeightField harmonic_interpolation(HeightField f) {
  const Eigen::Index nb = f.nb();
  std::vector<int> index(f.na() * nb, -1);
  std::vector<Eigen::Index> free_nodes;
  for (Eigen::Index i = 0; i < f.na(); ++i)
    for (Eigen::Index j = 0; j < nb; ++j)
      if (!f.dirichlet(i, j)) {
        index[i * nb + j] = int(free_nodes.size());
        free_nodes.push_back(i * nb + j);
      }
  const Eigen::Index n = Eigen::Index(free_nodes.size());
  if (n == 0) return f;
  std::vector<Eigen::Triplet<double>> trip;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const Eigen::Index i = free_nodes[r] / nb, j = free_nodes[r] % nb;
    const double ham = f.a(i) - f.a(i - 1), hap = f.a(i + 1) - f.a(i);
    const double hbm = f.b(j) - f.b(j - 1), hbp = f.b(j + 1) - f.b(j);
    const double Ca = 2 / (ham + hap), Cb = 2 / (hbm + hbp);
    const std::array<std::pair<Eigen::Index, double>, 4> nbr = {
        {{(i + 1) * nb + j, Ca / hap}, {(i - 1) * nb + j, Ca / ham}, {i * nb + j + 1, Cb / hbp}, {i * nb + j - 1, Cb / hbm}}};
    double diag = 0;
    for (auto [k, wgt] : nbr) {
      diag += wgt;
      if (index[k] >= 0)
        trip.emplace_back(int(r), index[k], wgt);
      else
        rhs(r) -= wgt * f.u(k / nb, k % nb);
    }
    trip.emplace_back(int(r), int(r), -diag);
  }
  Eigen::SparseMatrix<double> A(n, n);
  A.setFromTriplets(trip.begin(), trip.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success) throw std::runtime_error("harmonic interpolation: factorization failed");
  const Eigen::VectorXd x = lu.solve(rhs);
  for (Eigen::Index r = 0; r < n; ++r) f.u(free_nodes[r] / nb, free_nodes[r] % nb) = x(r);
  return f;
}

Eigen::VectorXd lower_barrier(const HeightField& f, const std::vector<Eigen::Index>& free_nodes) {
  const Eigen::Index nb = f.nb();
  Eigen::VectorXd best = Eigen::VectorXd::Constant(Eigen::Index(free_nodes.size()), -std::numeric_limits<double>::infinity());
  for (int across = 0; across < 2; ++across) {
    const Eigen::VectorXd& x = across == 0 ? f.a : f.b;
    const Eigen::VectorXd& y = across == 0 ? f.b : f.a;
    const double extent = x(x.size() - 1) - x(0), mid = 0.5 * (x(0) + x(x.size() - 1));
    for (double stretch : {1.05, 1.25, 1.6, 2.5, 4.0}) {
      const double c = std::numbers::pi / std::max(std::numbers::pi, stretch * extent);
      const double t = std::sqrt(1 - c * c) / c;
      for (double sign : {-1.0, 1.0}) {
        auto v = [&](Eigen::Index i, Eigen::Index j) {
          const Eigen::Index ix = across == 0 ? i : j, iy = across == 0 ? j : i;
          return -std::log(std::cos((x(ix) - mid) * c)) / (c * c) + sign * t * y(iy);
        };
        double lift = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < f.na(); ++i)
          for (Eigen::Index j = 0; j < nb; ++j)
            if (f.dirichlet(i, j)) lift = std::min(lift, f.u(i, j) - v(i, j));
        for (std::size_t r = 0; r < free_nodes.size(); ++r)
          best(Eigen::Index(r)) = std::max(best(Eigen::Index(r)), v(free_nodes[r] / nb, free_nodes[r] % nb) + lift);
      }
    }
  }
  return best;
}

std::pair<HeightField, SolveReport> solve_dirichlet(HeightField f, const SolveOptions& opt) {
  f.validate();
  SolveReport rep;
  if (opt.harmonic_start) f = harmonic_interpolation(std::move(f));

  Linearization L = linearize(f);
  const auto& free_nodes = L.free_nodes;
  const Eigen::Index nb = f.nb();
  if (free_nodes.empty()) {
    rep.converged = true;
    return {std::move(f), rep};
  }
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.analyzePattern(L.jacobian);

  auto apply = [&](HeightField& g, const Eigen::VectorXd& x) {
    for (std::size_t r = 0; r < free_nodes.size(); ++r) g.u(free_nodes[r] / nb, free_nodes[r] % nb) = x(Eigen::Index(r));
  };
  auto values = [&](const HeightField& g) {
    Eigen::VectorXd x(free_nodes.size());
    for (std::size_t r = 0; r < free_nodes.size(); ++r) x(Eigen::Index(r)) = g.u(free_nodes[r] / nb, free_nodes[r] % nb);
    return x;
  };

  // Line-search merit: residual weighted by the node's control-volume area.
  Eigen::VectorXd weight(free_nodes.size());
  for (std::size_t r = 0; r < free_nodes.size(); ++r) {
    const Eigen::Index i = free_nodes[r] / nb, j = free_nodes[r] % nb;
    weight(Eigen::Index(r)) = 0.25 * (f.a(i + 1) - f.a(i - 1)) * (f.b(j + 1) - f.b(j - 1));
  }
  auto merit = [&](const Eigen::VectorXd& R) { return R.cwiseProduct(weight).norm(); };

  // Node values carry absolute error eps |u|, which second differences on
  // cells of size h amplify by 1 / h^2. Each node is held to the larger of
  // tol and its own round-off floor.
  Eigen::VectorXd floor_h2(free_nodes.size());
  for (std::size_t r = 0; r < free_nodes.size(); ++r) {
    const Eigen::Index i = free_nodes[r] / nb, j = free_nodes[r] % nb;
    const double hl = std::min({f.a(i) - f.a(i - 1), f.a(i + 1) - f.a(i), f.b(j) - f.b(j - 1), f.b(j + 1) - f.b(j)});
    floor_h2(Eigen::Index(r)) = opt.floor_factor * std::numeric_limits<double>::epsilon() / (hl * hl);
  }
  auto scaled = [&](const HeightField& g, const Eigen::VectorXd& R) {
    double worst = 0;
    for (std::size_t r = 0; r < free_nodes.size(); ++r) {
      const double u = g.u(free_nodes[r] / nb, free_nodes[r] % nb);
      const double allowed = std::max(opt.tol, floor_h2(Eigen::Index(r)) * (1 + std::abs(u)));
      worst = std::max(worst, std::abs(R(Eigen::Index(r))) / allowed);
    }
    return worst;
  };

  // Vertical graphs obey u <= max datum (div(grad u / W) = 1 / W > 0) and
  // lie above every tilted grim reaper placed under the data.
  Eigen::VectorXd u_max = Eigen::VectorXd::Constant(Eigen::Index(free_nodes.size()), std::numeric_limits<double>::infinity());
  Eigen::VectorXd u_min = -u_max;
  if (f.dir.c == 0) {
    u_max.setConstant(-u_max(0));
    for (Eigen::Index i = 0; i < f.na(); ++i)
      for (Eigen::Index j = 0; j < nb; ++j)
        if (f.dirichlet(i, j)) u_max.array() = u_max.array().max(f.u(i, j));
    u_min = lower_barrier(f, free_nodes) - Eigen::VectorXd::Constant(u_min.size(), opt.barrier_slack);
  }

  // Pseudo-transient fallback: solve (J - sigma diag|J|) d = -R, with sigma
  // shrinking as the merit drops until plain Newton takes over again.
  double sigma = 0;
  auto shifted = [&](double sg) {
    Eigen::SparseMatrix<double> A = L.jacobian;
    if (sg > 0)
      for (Eigen::Index k = 0; k < A.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(A, k); it; ++it)
          if (it.row() == it.col()) it.valueRef() -= sg * std::abs(it.value());
    return A;
  };

  rep.residual = L.residual.cwiseAbs().maxCoeff();
  for (rep.iterations = 0; rep.iterations < opt.max_iter; ++rep.iterations) {
    rep.scaled_residual = scaled(f, L.residual);
    if (rep.scaled_residual <= 1) {
      rep.converged = true;
      break;
    }
    Eigen::SparseMatrix<double> A = shifted(sigma);
    lu.factorize(A);
    if (lu.info() != Eigen::Success) {
      Eigen::SparseMatrix<double> I(A.rows(), A.cols());
      I.setIdentity();
      A += 1e-8 * I;
      lu.analyzePattern(A);
      lu.factorize(A);
      rep.regularized = true;
      if (lu.info() != Eigen::Success) {
        rep.message = "Jacobian singular after diagonal shift";
        return {std::move(f), rep};
      }
    }
    Eigen::VectorXd step = lu.solve(-L.residual);
    step += lu.solve(-L.residual - A * step);
    const Eigen::VectorXd x0 = values(f);
    const double norm0 = merit(L.residual);
    double lambda = 1;
    bool accepted = false;
    HeightField trial = f;
    for (int k = 0; k <= opt.max_halvings; ++k, lambda /= 2) {
      apply(trial, (x0 + lambda * step).cwiseMin(u_max).cwiseMax(u_min));
      Linearization T = linearize(trial);
      if (T.residual.allFinite() && merit(T.residual) < norm0) {
        f = std::move(trial);
        L = std::move(T);
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (sigma == 0) {
        sigma = opt.pseudo_time_shift;
      } else {
        sigma *= 10;
      }
      if (sigma > 1e12) {
        rep.message = "line search failed to reduce the residual";
        return {std::move(f), rep};
      }
      rep.damping.push_back(0);
      rep.shift.push_back(sigma);
      rep.history.push_back(rep.residual);
      continue;
    }
    rep.damping.push_back(lambda);
    rep.shift.push_back(sigma);
    const double norm1 = merit(L.residual);
    if (sigma > 0) {
      sigma *= std::min(1.0, norm1 / norm0);
      if (sigma < 1e-10) sigma = 0;
    }
    rep.residual = L.residual.cwiseAbs().maxCoeff();
    rep.history.push_back(rep.residual);
  }
  rep.scaled_residual = scaled(f, L.residual);
  if (!rep.converged && rep.scaled_residual <= 1) rep.converged = true;
  if (!rep.converged && rep.message.empty()) rep.message = "max_iter reached";
  return {std::move(f), rep};
}

}  // namespace tslab
