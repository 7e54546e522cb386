#include "tslab/report.hpp"

#include "tslab/differential.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace tslab {

Json to_json(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

Json to_json(const SlabFit<double>& f) {
  return {{"normal", to_json(f.normal)}, {"phi", f.phi}, {"offset", f.offset}, {"width", f.width}};
}

Json to_json(const EntropyResult& r) {
  return {{"lambda_hat", r.F},
          {"x0", to_json(r.x0)},
          {"s0", r.s0},
          {"truncation_radius", r.truncation_radius},
          {"tail_bound", r.tail_bound},
          {"tail_valid", r.tail_valid()},
          {"evaluations", r.evaluations}};
}

namespace {

Json to_json(const WingCount& c) {
  return {{"omega", c.omega},
          {"omega_P", c.omega_P},
          {"omega_G", c.omega_G},
          {"lambda_hat", c.lambda()},
          {"slice_components", c.slice_components},
          {"unclassified", c.unclassified}};
}

}  // namespace

Json to_json(const WingReport& r) {
  Json trace = Json::array();
  for (const CensusRow& row : r.trace) trace.push_back({{"t", row.t}, {"mu", row.mu}, {"slices", row.slices}});
  return {{"t_stable", r.t_stable}, {"plus", to_json(r.plus)},     {"minus", to_json(r.minus)},
          {"monotone", r.monotone}, {"slices_match", r.slices_match}, {"flags", r.flags},
          {"trace", trace}};
}

Json to_json(const LambdaVerdict& v) {
  return {{"lambda_hat", v.lambda},
          {"lambda_plus", v.lambda_plus},
          {"lambda_minus", v.lambda_minus},
          {"consistent", v.consistent},
          {"failures", v.failures}};
}

Json to_json(const SolveReport& r) {
  return {{"converged", r.converged},   {"iterations", r.iterations}, {"residual", r.residual},
          {"scaled_residual", r.scaled_residual}, {"regularized", r.regularized}, {"message", r.message},
          {"history", r.history},       {"damping", r.damping},       {"shift", r.shift}};
}

Json to_json(const SpineCheck& s) {
  Json spine = Json::array();
  for (std::size_t k = 0; k < s.spine.size(); ++k) spine.push_back({{"p", to_json(s.spine[k])}, {"normal_x", s.normal_x[k]}});
  return {{"ok", s.ok()},           {"max_normal_x", s.max_normal_x}, {"lines_sampled", s.lines_sampled},
          {"lines_bad", s.lines_bad}, {"split_bad", s.split_bad},      {"spine", spine}};
}

Json to_json(const TangentSplit& s) {
  return {{"components", s.total}, {"positive", s.positive}, {"negative", s.negative}};
}

Json to_json(const std::vector<EquatorArc>& arcs) {
  Json out = Json::array();
  for (const EquatorArc& a : arcs)
    out.push_back({{"lo", a.lo}, {"hi", a.hi}, {"lo_to_axis", a.lo_to_axis}, {"hi_to_axis", a.hi_to_axis}});
  return out;
}

Json to_json(const RadoReport& r, const TriMeshd& mesh) {
  Json crit = Json::array();
  for (const CriticalVertex& c : r.critical)
    crit.push_back({{"vertex", c.vertex}, {"multiplicity", c.multiplicity}, {"p", to_json(mesh.point(c.vertex))}});
  Json ext = Json::array();
  for (int v : r.extrema) ext.push_back({{"vertex", v}, {"p", to_json(mesh.point(v))}});
  return {{"nu", to_json(r.nu)}, {"N", r.N}, {"perturbed", r.perturbed}, {"critical", crit}, {"extrema", ext}};
}

Json to_json(const HSet& s, const TriMeshd& mesh) {
  Json lines = Json::array();
  for (const HPolyline& l : s.lines) {
    double zlo = std::numeric_limits<double>::infinity(), zhi = -zlo;
    for (const Vec3& p : l.pts) zlo = std::min(zlo, p.z()), zhi = std::max(zhi, p.z());
    lines.push_back({{"points", l.pts.size()},
                     {"closed", l.closed},
                     {"ends_on_boundary", l.ends_on_boundary(mesh)},
                     {"z_range", Json::array({zlo, zhi})}});
  }
  return {{"identically_zero", s.identically_zero}, {"anomalies", s.anomalies}, {"points", s.size()}, {"curves", lines}};
}

Json to_json(const Verdict& v) {
  Json j = {{"name", v.name}, {"anchor", v.anchor}, {"pass", v.pass}, {"measured", v.measured}, {"expected", v.expected}};
  if (!v.note.empty()) j["note"] = v.note;
  return j;
}

Json report_header(const std::string& subcommand, const Provenance& p) {
  Json inputs = Json::array();
  for (const auto& [path, hash] : p.inputs) inputs.push_back({{"path", path}, {"sha256", hash}});
  return {{"schema", kReportSchema},
          {"tool", {{"name", "tslab"}, {"version", kToolVersion}}},
          {"subcommand", subcommand},
          {"command", p.command},
          {"inputs", inputs},
          {"params", p.params}};
}

ResidualSummary residual_summary(const TriMeshd& mesh, double q) {
  const ResidualReport<double> r = translator_residual(mesh);
  std::vector<double> vals;
  for (Eigen::Index v = 0; v < r.per_vertex.size(); ++v)
    if (r.reliable(v)) vals.push_back(r.per_vertex(v));
  ResidualSummary s;
  s.q = q;
  s.vertices = long(vals.size());
  if (vals.empty()) return s;
  std::sort(vals.begin(), vals.end());
  s.max = vals.back();
  s.quantile = vals[std::min(vals.size() - 1, std::size_t(std::ceil(q * double(vals.size()))) - (q > 0))];
  return s;
}

bool FullReport::pass() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
}

FullReport run_report(const TriMeshd& input, const ReportOptions& opt) {
  const TriMeshd mesh = input.has_curvature() ? input : differential_quantities(input);
  const double h = opt.h > 0 ? opt.h : mesh.median_edge_length();
  FullReport rep;
  rep.sections["mesh"] = {{"vertices", mesh.num_vertices()}, {"faces", mesh.faces().rows()}, {"h", h}};

  const ResidualSummary res = residual_summary(mesh, opt.residual_quantile);
  rep.sections["translator_residual"] = {
      {"max", res.max}, {"quantile", res.q}, {"quantile_value", res.quantile}, {"reliable_vertices", res.vertices}};
  rep.verdicts.push_back({"translator_residual", "H = -<e3, N>", res.vertices > 0 && res.quantile <= opt.residual_tol,
                          res.quantile, {{"at_most", opt.residual_tol}},
                          "quantile " + std::to_string(res.q) + " over reliable vertices"});

  const SlabFit<double> fit = fit_slab(mesh);
  rep.sections["slab"] = to_json(fit);
  {
    const bool planar = fit.width <= 3 * h;
    Verdict v{"slab_width", "width >= pi", planar || fit.width >= std::numbers::pi - 3 * h, fit.width,
              {{"at_least", std::numbers::pi - 3 * h}}, planar ? "planar" : ""};
    rep.verdicts.push_back(v);
  }

  int lambda = -1;
  try {
    const Eigen::VectorXd y = mesh.vertices().col(1);
    const double reach = std::min(y.maxCoeff(), -y.minCoeff()) - 2 * h;
    const double t_max = opt.t_max > 0 ? opt.t_max : 0.9 * reach;
    const double step = opt.step > 0 ? opt.step : (t_max - opt.t_min) / 20;
    const WingReport w = wing_census(mesh, opt.t_min, t_max, step);
    const LambdaVerdict lv = lambda_from_wings(w);
    lambda = lv.lambda;
    rep.sections["wings"] = to_json(w);
    rep.sections["lambda"] = to_json(lv);
    rep.verdicts.push_back({"wing_counts_consistent", "lambda = omega_P^- + 2 omega_G^- = omega_P^+ + 2 omega_G^+",
                            lv.consistent && w.plus.unclassified == 0 && w.minus.unclassified == 0,
                            to_json(lv), {{"consistent", true}}, ""});
    rep.verdicts.push_back({"mu_monotone", "mu(t) is non-decreasing", w.monotone, w.monotone, true, ""});
  } catch (const std::exception& e) {
    rep.sections["wings"] = {{"error", e.what()}};
    rep.verdicts.push_back({"wing_census", "mu(t) is eventually constant", false, nullptr, nullptr, e.what()});
  }

  if (opt.entropy) {
    try {
      const EntropyResult e = entropy_sup(mesh, opt.search);
      rep.sections["entropy"] = to_json(e);
      if (lambda >= 0)
        rep.verdicts.push_back({"entropy_matches_wings", "lambda = omega_P + 2 omega_G",
                                std::abs(e.F - lambda) <= opt.entropy_tol, e.F,
                                {{"value", lambda}, {"tolerance", opt.entropy_tol}}, ""});
    } catch (const std::exception& e) {
      rep.sections["entropy"] = {{"error", e.what()}};
      rep.verdicts.push_back({"entropy", "sup F", false, nullptr, nullptr, e.what()});
    }
  }

  try {
    rep.sections["rado"] = to_json(rado_critical_points(mesh, opt.nu), mesh);
  } catch (const std::exception& e) {
    rep.sections["rado"] = {{"error", e.what()}};
  }
  const HSet hs = h_zero_set(mesh, opt.h_source);
  Json hj = to_json(hs, mesh);
  hj["source"] = to_string(opt.h_source);
  hj["equator_arcs"] = to_json(gauss_equator_image(hs));
  rep.sections["hset"] = hj;
  return rep;
}

}  // namespace tslab
