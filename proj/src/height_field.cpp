#include "tslab/height_field.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <stdexcept>

namespace tslab {

GraphDirection GraphDirection::from_angle(double theta) {
  GraphDirection d;
  d.theta = theta;
  if (std::abs(theta - std::numbers::pi / 2) < 1e-15) {
    d.s = 1;
    d.c = 0;
  } else if (theta == 0) {
    d.s = 0;
    d.c = 1;
  } else {
    d.s = std::sin(theta);
    d.c = std::cos(theta);
  }
  return d;
}

HeightField::HeightField(GraphDirection d, Eigen::VectorXd a_nodes, Eigen::VectorXd b_nodes, double spacing)
    : dir(d), a(std::move(a_nodes)), b(std::move(b_nodes)), h(spacing) {
  u = Eigen::MatrixXd::Zero(a.size(), b.size());
  dirichlet = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(a.size(), b.size(), false);
  for (Eigen::Index i = 0; i < na(); ++i)
    for (Eigen::Index j = 0; j < nb(); ++j) dirichlet(i, j) = on_grid_boundary(i, j);
}

void HeightField::validate() const {
  if (!(h > 0)) throw std::invalid_argument("height field: h must be positive");
  if (na() < 3 || nb() < 3) throw std::invalid_argument("height field: need at least 3x3 nodes");
  for (Eigen::Index i = 1; i < na(); ++i)
    if (!(a(i) > a(i - 1))) throw std::invalid_argument("height field: a nodes must increase");
  for (Eigen::Index j = 1; j < nb(); ++j)
    if (!(b(j) > b(j - 1))) throw std::invalid_argument("height field: b nodes must increase");
  if (!u.allFinite()) throw std::invalid_argument("height field: non-finite node value");
  for (Eigen::Index i = 0; i < na(); ++i)
    for (Eigen::Index j = 0; j < nb(); ++j)
      if (on_grid_boundary(i, j) && !dirichlet(i, j))
        throw std::invalid_argument("height field: boundary node without Dirichlet data");
}

Eigen::VectorXd graded_nodes(double lo, double hi, double h, const std::vector<double>& foci, double ratio,
                             int levels, double core) {
  if (!(hi > lo) || !(h > 0)) throw std::invalid_argument("graded_nodes: empty interval or bad spacing");
  std::vector<double> fixed{lo, hi};
  for (double f : foci) {
    if (f < lo || f > hi) continue;
    fixed.push_back(f);
    const double finest = h * std::pow(ratio, levels);
    const int n_core = int(std::lround(core / finest));
    for (int m = 1; m <= n_core; ++m) {
      const double off = core * m / n_core;
      if (f - off > lo) fixed.push_back(f - off);
      if (f + off < hi) fixed.push_back(f + off);
    }
    double off = n_core > 0 ? core : 0;
    for (int k = n_core > 0 ? levels - 1 : levels; k >= 1; --k) {
      off += h * std::pow(ratio, k);
      if (f - off > lo) fixed.push_back(f - off);
      if (f + off < hi) fixed.push_back(f + off);
    }
  }
  std::sort(fixed.begin(), fixed.end());
  fixed.erase(std::unique(fixed.begin(), fixed.end(), [h](double x, double y) { return y - x < 1e-9 * h; }),
              fixed.end());
  std::vector<double> out{fixed.front()};
  for (std::size_t k = 1; k < fixed.size(); ++k) {
    const double gap = fixed[k] - fixed[k - 1];
    const int n = std::max(1, int(std::ceil(gap / h - 1e-9)));
    for (int m = 1; m < n; ++m) out.push_back(fixed[k - 1] + gap * m / n);
    out.push_back(fixed[k]);
  }
  return Eigen::Map<Eigen::VectorXd>(out.data(), Eigen::Index(out.size()));
}

Eigen::VectorXd uniform_nodes(double lo, double hi, double h) { return graded_nodes(lo, hi, h); }

TriMeshd height_field_mesh(const HeightField& f) {
  const int na = int(f.na()), nb = int(f.nb());
  VertexMatrix<double> V(na * nb, 3);
  for (int i = 0; i < na; ++i)
    for (int j = 0; j < nb; ++j) V.row(i * nb + j) = f.point(i, j).transpose();
  // X_a x X_b = e1 x w = -v for a flat graph, so reverse the grid winding.
  return flipped(grid_mesh(V, na, nb));
}

void write_height_field(const HeightField& f, const std::string& csv_path, const std::string& json_path) {
  std::ofstream csv(csv_path);
  if (!csv) throw std::runtime_error("cannot write " + csv_path);
  csv << std::setprecision(17) << "a,b,u,dirichlet\n";
  long masked = 0;
  for (Eigen::Index i = 0; i < f.na(); ++i)
    for (Eigen::Index j = 0; j < f.nb(); ++j) {
      csv << f.a(i) << ',' << f.b(j) << ',' << f.u(i, j) << ',' << int(f.dirichlet(i, j)) << '\n';
      masked += f.dirichlet(i, j);
    }
  nlohmann::json j;
  j["theta"] = f.dir.theta;
  j["h"] = f.h;
  j["domain"] = {{"a", {f.a(0), f.a(f.na() - 1)}}, {"b", {f.b(0), f.b(f.nb() - 1)}}};
  j["shape"] = {f.na(), f.nb()};
  j["dirichlet_nodes"] = masked;
  j["csv"] = csv_path;
  std::ofstream js(json_path);
  if (!js) throw std::runtime_error("cannot write " + json_path);
  js << j.dump(2) << '\n';
}

}  // namespace tslab
