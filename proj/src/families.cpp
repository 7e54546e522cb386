#include "tslab/families.hpp"

#include <boost/numeric/odeint.hpp>

#include <array>
#include <cmath>
#include <numbers>

namespace tslab {

namespace {

constexpr double kPi = std::numbers::pi;

struct ProfileNode {
  double x, z;
};

/// Nodes on the right half of the profile z = -log cos(c x) / c^2, x >= 0,
/// spaced by arclength and ending exactly at z = z_cap.
std::vector<ProfileNode> profile_half(double c, double h, double growth, double h_max, double z_cap) {
  auto P = [c](double x) { return -std::log(std::cos(c * x)) / (c * c); };
  auto X = [c](double z) { return std::acos(std::exp(-z * c * c)) / c; };
  auto spacing = [&](double s) { return h_max > h ? std::min(h_max, h * (1 + growth * s)) : h; };

  // Fine table (param, s). Below slope 1 the parameter is x, above it z.
  const double x_switch = std::atan(c) / c;
  const double z_switch = P(x_switch);
  struct Fine {
    double x, z, s;
  };
  std::vector<Fine> fine{{0, 0, 0}};
  double s = 0;
  const double x_end1 = z_cap <= z_switch ? X(z_cap) : x_switch;
  for (double x = 0; x < x_end1;) {
    const double dx = std::min(spacing(s) / 32, x_end1 - x);
    const double xm = x + dx / 2;
    const double slope = std::tan(c * xm) / c;
    s += dx * std::sqrt(1 + slope * slope);
    x += dx;
    fine.push_back({x, P(x), s});
  }
  if (z_cap > z_switch) {
    for (double z = z_switch; z < z_cap;) {
      const double dz = std::min(spacing(s) / 32, z_cap - z);
      const double zm = z + dz / 2;
      const double t = std::tan(c * X(zm));
      const double dxdz = std::isfinite(t) && t > 0 ? c / t : 0.0;
      s += dz * std::sqrt(1 + dxdz * dxdz);
      z += dz;
      fine.push_back({X(z), z, s});
    }
  }
  const double total = s;

  std::vector<double> targets{0};
  for (double t = spacing(0); t < total; t += spacing(t)) targets.push_back(t);
  if (total - targets.back() < 0.5 * spacing(targets.back()) && targets.size() > 1) targets.pop_back();
  targets.push_back(total);

  std::vector<ProfileNode> nodes;
  std::size_t j = 0;
  for (double t : targets) {
    while (j + 1 < fine.size() && fine[j + 1].s < t) ++j;
    if (j + 1 >= fine.size()) {
      nodes.push_back({fine.back().x, fine.back().z});
      continue;
    }
    const Fine& a = fine[j];
    const Fine& b = fine[j + 1];
    const double lam = b.s > a.s ? (t - a.s) / (b.s - a.s) : 0.0;
    // Re-evaluate on the exact curve in whichever coordinate is well conditioned.
    if (b.z <= z_switch || z_cap <= z_switch) {
      const double x = a.x + lam * (b.x - a.x);
      nodes.push_back({x, P(x)});
    } else {
      const double z = a.z + lam * (b.z - a.z);
      nodes.push_back({X(z), z});
    }
  }
  nodes.front() = {0, 0};
  nodes.back() = {X(z_cap), z_cap};
  return nodes;
}

}  // namespace

double grim_reaper_height(double zeta, double x, double y) {
  const double c = std::cos(zeta);
  return -std::log(std::cos(x * c)) / (c * c) - y * std::tan(zeta);
}

double grim_reaper_half_width(double zeta) { return kPi / (2 * std::abs(std::cos(zeta))); }

TriMeshd grim_reaper(const GrimReaperParams& p) {
  if (std::abs(std::cos(p.zeta)) < 1e-12) throw FamilyError("grim_reaper: zeta = pi/2 is singular");
  if (!(p.h > 0) || !(p.y_extent > 0) || !(p.z_cap > 0)) throw FamilyError("grim_reaper: h, y_extent and z_cap must be positive");
  const double c = std::abs(std::cos(p.zeta));
  const double tz = std::tan(p.zeta);
  const auto half = profile_half(c, p.h, p.growth, p.h_max, p.z_cap);

  std::vector<ProfileNode> prof;
  for (std::size_t i = half.size(); i-- > 1;) prof.push_back({-half[i].x, half[i].z});
  prof.insert(prof.end(), half.begin(), half.end());

  const double hr = p.h_ruling > 0 ? p.h_ruling : p.h;
  const int ny = std::max(2, int(std::lround(2 * p.y_extent / hr)) + 1);
  const int nx = int(prof.size());
  VertexMatrix<double> V(nx * ny, 3);
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) {
      const double y = -p.y_extent + 2 * p.y_extent * j / (ny - 1);
      V.row(i * ny + j) << prof[i].x, y, prof[i].z - y * tz;
    }
  return grid_mesh(V, nx, ny);
}

double BowlProfile::value(double x) const {
  if (x <= r.front()) return x * x / 4 + x * x * x * x / 128;
  if (x >= r.back()) x = r.back();
  const std::size_t i = std::min<std::size_t>(std::upper_bound(r.begin(), r.end(), x) - r.begin() - 1, r.size() - 2);
  const double d = r[i + 1] - r[i], t = (x - r[i]) / d;
  const double h00 = 2 * t * t * t - 3 * t * t + 1, h10 = t * t * t - 2 * t * t + t;
  const double h01 = -2 * t * t * t + 3 * t * t, h11 = t * t * t - t * t;
  return h00 * f[i] + h10 * d * fp[i] + h01 * f[i + 1] + h11 * d * fp[i + 1];
}

double BowlProfile::slope(double x) const {
  if (x <= r.front()) return x / 2 + x * x * x / 32;
  if (x >= r.back()) x = r.back();
  const std::size_t i = std::min<std::size_t>(std::upper_bound(r.begin(), r.end(), x) - r.begin() - 1, r.size() - 2);
  const double d = r[i + 1] - r[i], t = (x - r[i]) / d;
  const double d00 = 6 * t * t - 6 * t, d10 = 3 * t * t - 4 * t + 1, d01 = -6 * t * t + 6 * t, d11 = 3 * t * t - 2 * t;
  return (d00 * f[i] + d01 * f[i + 1]) / d + d10 * fp[i] + d11 * fp[i + 1];
}

double BowlProfile::curvature(double x) const {
  const double g = slope(x);
  if (x <= 0) return 0.5;
  return (1 + g * g) * (1 - g / x);
}

BowlProfile bowl_profile(double r_max, double tol, double table_step) {
  if (!(r_max > 1)) throw FamilyError("bowl: R_max must exceed 1");
  using State = std::array<double, 2>;
  namespace ode = boost::numeric::odeint;
  const double r0 = 1e-3;
  State y{r0 * r0 / 4 + std::pow(r0, 4) / 128, r0 / 2 + std::pow(r0, 3) / 32};
  auto rhs = [](const State& s, State& d, double r) {
    d[0] = s[1];
    d[1] = (1 + s[1] * s[1]) * (1 - s[1] / r);
  };

  BowlProfile p;
  p.r.push_back(0);
  p.f.push_back(0);
  p.fp.push_back(0);
  std::vector<double> times{r0};
  const int n = int(std::ceil(r_max / table_step));
  for (int k = 1; k <= n; ++k) times.push_back(std::min(r_max, k * table_step));
  double last_r = r0;
  try {
    auto stepper = ode::make_dense_output(tol, tol, ode::runge_kutta_dopri5<State>());
    ode::integrate_times(stepper, rhs, y, times.begin(), times.end(), 1e-4, [&](const State& s, double r) {
      last_r = r;
      if (r <= r0) return;
      p.r.push_back(r);
      p.f.push_back(s[0]);
      p.fp.push_back(s[1]);
    });
  } catch (const std::exception& e) {
    throw FamilyError("bowl: integrator failed after r = " + std::to_string(last_r) + " (" + e.what() + ")");
  }
  return p;
}

Bowl bowl(double r_max, double h) {
  if (!(h > 0)) throw FamilyError("bowl: h must be positive");
  Bowl out{TriMeshd(), bowl_profile(r_max)};
  const int n = int(std::floor(r_max / h));
  const int side = 2 * n + 1;
  auto inside = [&](int i, int j) { return std::hypot((i - n) * h, (j - n) * h) <= r_max + 1e-12; };
  std::vector<int> index(side * side, -1);
  std::vector<std::array<int, 3>> faces;
  std::vector<Vec3> pts;
  auto vid = [&](int i, int j) {
    int& k = index[i * side + j];
    if (k < 0) {
      const double x = (i - n) * h, y = (j - n) * h;
      k = int(pts.size());
      pts.push_back({x, y, out.profile.value(std::hypot(x, y))});
    }
    return k;
  };
  for (int i = 0; i + 1 < side; ++i)
    for (int j = 0; j + 1 < side; ++j) {
      if (!(inside(i, j) && inside(i + 1, j) && inside(i + 1, j + 1) && inside(i, j + 1))) continue;
      const int a = vid(i, j), b = vid(i + 1, j), c = vid(i + 1, j + 1), d = vid(i, j + 1);
      faces.push_back({a, b, c});
      faces.push_back({a, c, d});
    }
  VertexMatrix<double> V(pts.size(), 3);
  for (std::size_t k = 0; k < pts.size(); ++k) V.row(k) = pts[k].transpose();
  FaceMatrix F(faces.size(), 3);
  for (std::size_t k = 0; k < faces.size(); ++k) F.row(k) << faces[k][0], faces[k][1], faces[k][2];
  out.mesh = TriMeshd(std::move(V), std::move(F));
  return out;
}

TriMeshd vertical_plane(double x0, double y_extent, double z_extent, double h) {
  if (!(h > 0) || !(y_extent > 0) || !(z_extent > 0)) throw FamilyError("plane: extents and h must be positive");
  const int ny = int(std::lround(2 * y_extent / h)) + 1, nz = int(std::lround(2 * z_extent / h)) + 1;
  VertexMatrix<double> V(ny * nz, 3);
  for (int i = 0; i < ny; ++i)
    for (int j = 0; j < nz; ++j)
      V.row(i * nz + j) << x0, -y_extent + 2 * y_extent * i / (ny - 1), -z_extent + 2 * z_extent * j / (nz - 1);
  return grid_mesh(V, ny, nz);
}

TriMeshd cylinder(double radius, double z_extent, double h, double angular_step) {
  if (!(radius > 0) || !(h > 0) || !(z_extent > 0) || !(angular_step > 0))
    throw FamilyError("cylinder: radius, extent, h and angular step must be positive");
  const int nt = std::max(3, int(std::ceil(2 * kPi / angular_step)));
  const int nz = int(std::lround(2 * z_extent / h)) + 1;
  VertexMatrix<double> V(nz * nt, 3);
  for (int i = 0; i < nz; ++i)
    for (int j = 0; j < nt; ++j) {
      const double t = 2 * kPi * j / nt;
      V.row(i * nt + j) << radius * std::cos(t), radius * std::sin(t), -z_extent + 2 * z_extent * i / (nz - 1);
    }
  return flipped(grid_mesh(V, nz, nt, true));
}

void FamilySpec::validate() const {
  if (!(h > 0)) throw FamilyError("family: h must be positive");
  if (h_ruling < 0) throw FamilyError("family: h_ruling must be nonnegative");
  for (double t : {y_extent, z_extent})
    if (!(t > 0) || !std::isfinite(t)) throw FamilyError("family: truncations must be positive and finite");
  if (tag == FamilyTag::grim_reaper && std::abs(std::cos(zeta)) < 1e-12) throw FamilyError("family: zeta = pi/2 rejected");
  if (tag == FamilyTag::grim_reaper && (zeta < 0 || zeta >= kPi)) throw FamilyError("family: zeta must lie in [0, pi)");
  if (tag == FamilyTag::bowl && !(r_max > 1)) throw FamilyError("family: R_max must exceed 1");
  if (tag == FamilyTag::shrinker_cylinder && !(radius > 0)) throw FamilyError("family: radius must be positive");
}

FamilyTag parse_family_tag(const std::string& name) {
  if (name == "plane") return FamilyTag::plane;
  if (name == "grim" || name == "grim_reaper") return FamilyTag::grim_reaper;
  if (name == "bowl") return FamilyTag::bowl;
  if (name == "cylinder" || name == "shrinker_cylinder") return FamilyTag::shrinker_cylinder;
  throw FamilyError("unknown family '" + name + "'");
}

std::string to_string(FamilyTag tag) {
  switch (tag) {
    case FamilyTag::plane: return "plane";
    case FamilyTag::grim_reaper: return "grim_reaper";
    case FamilyTag::bowl: return "bowl";
    case FamilyTag::shrinker_cylinder: return "shrinker_cylinder";
  }
  return "?";
}

TriMeshd make_family(const FamilySpec& s) {
  s.validate();
  switch (s.tag) {
    case FamilyTag::plane: return vertical_plane(s.x0, s.y_extent, s.z_extent, s.h);
    case FamilyTag::grim_reaper: {
      GrimReaperParams p;
      p.zeta = s.zeta;
      p.h = s.h;
      p.h_ruling = s.h_ruling;
      p.y_extent = s.y_extent;
      p.z_cap = s.z_extent;
      return grim_reaper(p);
    }
    case FamilyTag::bowl: return bowl(s.r_max, s.h).mesh;
    case FamilyTag::shrinker_cylinder: return cylinder(s.radius, s.z_extent, s.h, s.angular_step);
  }
  throw FamilyError("unreachable family tag");
}

TriMeshd calibration_surface(FamilyTag tag, const std::map<std::string, double>& params, double h) {
  auto get = [&](const char* k, double d) {
    auto it = params.find(k);
    return it == params.end() ? d : it->second;
  };
  switch (tag) {
    case FamilyTag::plane: return vertical_plane(get("x0", 0), get("y_extent", 10), get("z_extent", 10), h);
    case FamilyTag::shrinker_cylinder:
      return cylinder(get("radius", std::sqrt(2.0)), get("z_extent", 12), h, get("angular_step", 0.01));
    default: throw FamilyError("calibration_surface: tag must be plane or shrinker_cylinder");
  }
}

}  // namespace tslab
