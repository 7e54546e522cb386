#include "CLI11.hpp"
#include "tslab/differential.hpp"
#include "tslab/families.hpp"
#include "tslab/height_field.hpp"
#include "tslab/io.hpp"
#include "tslab/parallel.hpp"
#include "tslab/pitchfork.hpp"
#include "tslab/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>

using namespace tslab;

namespace {

struct Common {
  std::string json_path;
  double h = 0;
  bool quiet = false;
  int threads = 0;
};

struct Run {
  std::string name;
  Provenance prov;
  Json result = Json::object();
  std::vector<Verdict> verdicts;
  std::string error;
};

Json echo_value(const std::string& s) {
  if (s.empty()) return nullptr;
  if (s.front() == '[' && s.back() == ']') {
    Json arr = Json::array();
    std::stringstream in(s.substr(1, s.size() - 2));
    std::string part;
    while (std::getline(in, part, ',')) arr.push_back(echo_value(part));
    return arr;
  }
  char* end = nullptr;
  const double d = std::strtod(s.c_str(), &end);
  if (end && *end == '\0') return d;
  if (s == "true") return true;
  if (s == "false") return false;
  return s;
}

void echo_options(const CLI::App& app, Json& params) {
  for (const CLI::Option* o : app.get_options()) {
    const std::string name = o->get_name(false, true);
    if (name.empty() || name == "--help" || name == "--config") continue;
    const std::string key = o->get_lnames().empty() ? o->get_name() : o->get_lnames().front();
    const auto& res = o->results();
    if (res.size() > 1) {
      Json arr = Json::array();
      for (const auto& r : res) arr.push_back(echo_value(r));
      params[key] = arr;
    } else if (res.size() == 1) {
      params[key] = o->get_expected_min() == 0 ? Json(true) : echo_value(res.front());
    } else if (!o->get_default_str().empty()) {
      params[key] = echo_value(o->get_default_str());
    } else if (o->get_expected_min() == 0) {
      params[key] = false;
    }
  }
}

int finish(const Run& run, const Common& c) {
  Json doc = report_header(run.name, run.prov);
  doc["result"] = run.result;
  Json vs = Json::array();
  bool pass = run.error.empty();
  for (const Verdict& v : run.verdicts) {
    vs.push_back(to_json(v));
    pass = pass && v.pass;
  }
  doc["verdicts"] = vs;
  if (!run.error.empty()) doc["error"] = run.error;
  doc["pass"] = pass;
  doc["exit_code"] = pass ? 0 : 1;
  const std::string text = doc.dump(2) + "\n";
  if (c.json_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(c.json_path, std::ios::binary);
    out << text;
    if (!out) {
      std::cerr << "tslab: cannot write " << c.json_path << "\n";
      return 1;
    }
  }
  if (!c.quiet) {
    for (const Verdict& v : run.verdicts)
      std::cerr << (v.pass ? "PASS " : "FAIL ") << v.name << "  measured " << v.measured.dump() << "  expected "
                << v.expected.dump() << "\n";
    if (!run.error.empty()) std::cerr << "error: " << run.error << "\n";
  }
  return pass ? 0 : 1;
}

TriMeshd load(Run& run, const std::string& path) {
  run.prov.inputs.emplace_back(path, file_sha256(path));
  return read_obj(path);
}

std::string exact(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<double> parse_triple(const std::string& s, char sep) {
  std::vector<double> v;
  std::stringstream in(s);
  std::string part;
  while (std::getline(in, part, sep)) v.push_back(std::stod(part));
  return v;
}

struct Scan {
  double t_min = 0.5, t_max = 0, step = 0;
};

Scan parse_scan(const std::string& s) {
  if (s.empty()) return {};
  const auto v = parse_triple(s, ':');
  if (v.size() != 3 || !(v[2] > 0) || !(v[1] >= v[0])) throw std::invalid_argument("--scan expects a:b:c with a <= b, c > 0");
  return {v[0], v[1], v[2]};
}

void write_heat_svg(const std::string& path, const std::vector<EntropyProbe>& probes) {
  std::map<double, std::map<double, double>> table;  // s0 -> x -> max F over (y, z)
  for (const EntropyProbe& p : probes)
    if (p.lumped) {
      double& cell = table[p.s0].try_emplace(p.x0.x(), -1e300).first->second;
      cell = std::max(cell, p.F);
    }
  double lo = 1e300, hi = -1e300;
  std::size_t cols = 0;
  for (const auto& [s, row] : table) {
    cols = std::max(cols, row.size());
    for (const auto& [x, f] : row) lo = std::min(lo, f), hi = std::max(hi, f);
  }
  const double cw = 24, ch = 18, left = 70, top = 30;
  std::ofstream out(path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << left + cw * double(cols) + 20 << "\" height=\""
      << top + ch * double(table.size()) + 20 << "\">\n";
  out << "<text x=\"10\" y=\"18\" font-size=\"12\">max F over (y, z); rows s0, columns x0; range " << lo << " .. " << hi
      << "</text>\n";
  int r = 0;
  for (const auto& [s, row] : table) {
    out << "<text x=\"4\" y=\"" << top + ch * (r + 0.75) << "\" font-size=\"10\">" << s << "</text>\n";
    int c = 0;
    for (const auto& [x, f] : row) {
      const double q = hi > lo ? (f - lo) / (hi - lo) : 0.5;
      const int red = int(std::lround(255 * q)), blue = 255 - red;
      out << "<rect x=\"" << left + cw * c << "\" y=\"" << top + ch * r << "\" width=\"" << cw << "\" height=\"" << ch
          << "\" fill=\"rgb(" << red << ",64," << blue << ")\"><title>x0=" << x << " s0=" << s << " F=" << f
          << "</title></rect>\n";
      ++c;
    }
    ++r;
  }
  out << "</svg>\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Translators in slabs: generate, solve and analyze translating surfaces"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value file mirroring the flags; flags win");
  Common c;
  app.add_option("--json", c.json_path, "JSON output path (stdout when omitted)");
  app.add_option("--h", c.h, "mesh spacing; for analysis subcommands the spacing used in tolerances (0: median edge)");
  app.add_flag("--quiet", c.quiet, "no summary on stderr");
  app.add_option("--threads", c.threads, "worker threads (fallback TSLAB_THREADS)");
  app.fallthrough();

  // gen
  FamilySpec spec;
  std::string family, gen_out;
  auto* gen = app.add_subcommand("gen", "generate a family mesh");
  gen->add_option("--family", family, "grim | plane | bowl | cylinder")->required();
  gen->add_option("--zeta", spec.zeta, "grim reaper tilt")->capture_default_str();
  gen->add_option("--x0", spec.x0, "plane offset")->capture_default_str();
  gen->add_option("--r-max", spec.r_max, "bowl radius")->capture_default_str();
  gen->add_option("--radius", spec.radius, "cylinder radius")->default_str(exact(spec.radius));
  gen->add_option("--h-ruling", spec.h_ruling, "spacing along y (0: h; grim default 0.5)");
  gen->add_option("--y-extent", spec.y_extent, "half-length in y (grim default 45)");
  gen->add_option("--z-extent", spec.z_extent, "grim reaper cap / plane and cylinder half-height")->capture_default_str();
  gen->add_option("--angular-step", spec.angular_step, "cylinder angular step")->capture_default_str();
  gen->add_option("--out", gen_out, "OBJ output")->required();

  // solve
  std::string solve_kind, solve_out, solve_field;
  double w = std::numbers::pi, L = 6 * std::numbers::pi, M = 12;
  bool piece_only = false, require_certified = false;
  SolveOptions sopt;
  auto* solve = app.add_subcommand("solve", "Dirichlet solve for a delta-wing or a pitchfork");
  solve->add_option("kind", solve_kind, "delta-wing | pitchfork")->required()->check(CLI::IsMember({"delta-wing", "pitchfork"}));
  solve->add_option("--w", w, "slab half-width (delta-wing) or width (pitchfork)")->default_str(exact(w));
  solve->add_option("--L", L, "half-length in b")->default_str(exact(L));
  solve->add_option("--M", M, "cap height")->capture_default_str();
  solve->add_option("--tol", sopt.tol, "Newton tolerance")->capture_default_str();
  solve->add_option("--max-iter", sopt.max_iter, "Newton iterations")->capture_default_str();
  solve->add_flag("--piece-only", piece_only, "pitchfork: skip the reflection doubling");
  solve->add_flag("--require-certified", require_certified, "fail unless the cap certificate holds");
  solve->add_option("--out", solve_out, "OBJ output");
  solve->add_option("--field", solve_field, "height field output prefix (.csv, .json)");

  // entropy
  std::string mesh_path, heat_svg;
  SearchOptions search;
  double expect_F = std::nan(""), entropy_tol = 2e-3;
  auto* entropy = app.add_subcommand("entropy", "sup of the Gaussian density over centers and scales");
  entropy->add_option("mesh", mesh_path, "OBJ input")->required()->check(CLI::ExistingFile);
  entropy->add_option("--s-min", search.s_min)->capture_default_str();
  entropy->add_option("--s-max", search.s_max)->capture_default_str();
  entropy->add_option("--grid", search.grid)->capture_default_str();
  entropy->add_option("--scales", search.scales)->capture_default_str();
  entropy->add_option("--max-simplex-iter", search.max_simplex_iter)->capture_default_str();
  entropy->add_option("--refine", search.refine)->capture_default_str();
  entropy->add_option("--expect", expect_F, "expected value; adds a verdict");
  entropy->add_option("--tol", entropy_tol, "tolerance for --expect")->capture_default_str();
  entropy->add_option("--svg", heat_svg, "scan heat table");

  // wings
  std::string scan_text, slices_csv, svg_dir;
  int expect_lambda = -1;
  auto* wings = app.add_subcommand("wings", "wing census");
  wings->add_option("mesh", mesh_path, "OBJ input")->required()->check(CLI::ExistingFile);
  wings->add_option("--scan", scan_text, "t_min:t_max:step (default 0.5 to 0.9 of the y-reach, 20 steps)");
  wings->add_option("--csv", slices_csv, "slices at the scanned offsets");
  wings->add_option("--svg-dir", svg_dir, "one SVG per scanned offset");
  wings->add_option("--expect-lambda", expect_lambda, "expected wing count lambda; adds a verdict");

  // rado
  std::vector<double> nu{0, 1, 0};
  int expect_N = -1;
  auto* rado = app.add_subcommand("rado", "critical points of <p, nu>");
  rado->add_option("mesh", mesh_path, "OBJ input")->required()->check(CLI::ExistingFile);
  rado->add_option("--nu", nu, "direction x,y,z")->expected(3)->delimiter(',')->capture_default_str();
  rado->add_option("--expect", expect_N, "expected saddle count; adds a verdict");

  // hset
  std::string source_text = "mean_curvature", equator_svg;
  double gap = 0.05;
  auto* hset = app.add_subcommand("hset", "zero set of the mean curvature and its Gauss image");
  hset->add_option("mesh", mesh_path, "OBJ input")->required()->check(CLI::ExistingFile);
  hset->add_option("--source", source_text, "mean_curvature | translator")->capture_default_str();
  hset->add_option("--gap", gap, "arc merge gap (rad)")->capture_default_str();
  hset->add_option("--svg", equator_svg, "equator arcs");

  // report
  ReportOptions ropt;
  std::string report_source = "translator";
  auto* report = app.add_subcommand("report", "full verdict suite on a mesh");
  report->add_option("mesh", mesh_path, "OBJ input")->required()->check(CLI::ExistingFile);
  report->add_option("--residual-tol", ropt.residual_tol)->capture_default_str();
  report->add_option("--residual-quantile", ropt.residual_quantile)->capture_default_str();
  report->add_option("--scan", scan_text, "t_min:t_max:step");
  report->add_flag("--entropy", ropt.entropy, "include the entropy search");
  report->add_option("--source", report_source, "mean_curvature | translator")->capture_default_str();
  report->add_option("--nu", nu, "Rado direction x,y,z")->expected(3)->delimiter(',')->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << app.help();
    app.exit(e);
    return 2;
  }

  if (c.threads <= 0)
    if (const char* env = std::getenv("TSLAB_THREADS")) c.threads = std::atoi(env);
  if (c.threads > 0) set_thread_count(c.threads);

  Run run;
  CLI::App* sub = app.get_subcommands().front();
  run.name = sub->get_name();
  run.prov.command.assign(argv, argv + argc);
  echo_options(app, run.prov.params);
  echo_options(*sub, run.prov.params);

  try {
    if (sub == gen) {
      spec.tag = parse_family_tag(family);
      spec.h = c.h > 0 ? c.h : spec.h;
      if (spec.tag == FamilyTag::grim_reaper) {
        if (gen->count("--y-extent") == 0) spec.y_extent = 45;
        if (gen->count("--h-ruling") == 0) spec.h_ruling = std::max(spec.h, 0.5);
      }
      run.prov.params["h"] = spec.h;
      run.prov.params["y-extent"] = spec.y_extent;
      run.prov.params["h-ruling"] = spec.h_ruling;
      const TriMeshd m = make_family(spec);
      write_obj(m, gen_out);
      run.result = {{"family", to_string(spec.tag)},
                    {"vertices", m.num_vertices()},
                    {"faces", m.faces().rows()},
                    {"out", gen_out},
                    {"sha256", file_sha256(gen_out)}};
    } else if (sub == solve) {
      CapOptions copt;
      copt.M = M;
      copt.solve = sopt;
      const double h = c.h > 0 ? c.h : 0.1;
      run.prov.params["h"] = h;
      const CappedSolve s = solve_kind == "pitchfork" ? pitchfork_piece(w, L, h, copt) : delta_wing(w, L, h, copt);
      run.result["solve"] = to_json(s.report);
      run.result["M"] = s.M;
      run.result["delta"] = s.delta;
      run.result["warnings"] = s.warnings;
      const CapCertificate& cc = s.certificate;
      if (cc.computed)
        run.result["cap_certificate"] = {{"M_check", cc.M_check},
                                         {"gauge_shift", cc.gauge_shift},
                                         {"core", cc.core},
                                         {"core_max_diff", cc.core_max_diff},
                                         {"stable_fraction", cc.stable_fraction},
                                         {"certified", cc.certified}};
      run.verdicts.push_back({"newton_converged", "Q(u) = 0 at free nodes", s.report.converged,
                              s.report.scaled_residual, {{"at_most", 1.0}}, s.report.message});
      if (require_certified)
        run.verdicts.push_back({"cap_certified", "u_{M+2} - u_M constant on the core", cc.computed && cc.certified, cc.core_max_diff,
                                {{"at_most", copt.certify_tol}}, ""});
      if (!solve_field.empty()) write_height_field(s.field, solve_field + ".csv", solve_field + ".json");
      if (!solve_out.empty()) {
        if (solve_kind == "pitchfork" && !piece_only) {
          const DoubledSurface d = reflect_double(s.field, s.ramp_halfwidth);
          run.result["doubled"] = {{"vertices", d.mesh.num_vertices()}, {"axis_vertices", d.axis.size()}, {"max_gap", d.max_gap}};
          write_obj(d.mesh, solve_out);
        } else {
          write_obj(height_field_mesh(s.field), solve_out);
        }
        run.result["out"] = solve_out;
        run.result["sha256"] = file_sha256(solve_out);
      }
    } else if (sub == entropy) {
      const TriMeshd m = load(run, mesh_path);
      std::vector<EntropyProbe> trace;
      const EntropyResult r = entropy_sup(m, search, heat_svg.empty() ? nullptr : &trace);
      run.result["entropy"] = to_json(r);
      if (!std::isnan(expect_F))
        run.verdicts.push_back({"entropy_value", "lambda = sup F_{x0,s0}", std::abs(r.F - expect_F) <= entropy_tol, r.F,
                                {{"value", expect_F}, {"tolerance", entropy_tol}}, ""});
      if (!heat_svg.empty()) write_heat_svg(heat_svg, trace);
    } else if (sub == wings) {
      const TriMeshd m = load(run, mesh_path);
      const double h = c.h > 0 ? c.h : m.median_edge_length();
      Scan sc = parse_scan(scan_text);
      const Eigen::VectorXd y = m.vertices().col(1);
      if (sc.t_max == 0) {
        sc.t_max = 0.9 * (std::min(y.maxCoeff(), -y.minCoeff()) - 2 * h);
        sc.step = (sc.t_max - sc.t_min) / 20;
      }
      run.prov.params["scan"] = {sc.t_min, sc.t_max, sc.step};
      try {
        const WingReport wr = wing_census(m, sc.t_min, sc.t_max, sc.step);
        const LambdaVerdict lv = lambda_from_wings(wr);
        run.result["wings"] = to_json(wr);
        run.result["lambda"] = to_json(lv);
        run.verdicts.push_back({"wing_counts_consistent", "lambda = omega_P^- + 2 omega_G^- = omega_P^+ + 2 omega_G^+",
                                lv.consistent && wr.plus.unclassified == 0 && wr.minus.unclassified == 0, to_json(lv),
                                {{"consistent", true}}, ""});
        run.verdicts.push_back({"mu_monotone", "mu(t) is non-decreasing", wr.monotone, wr.monotone, true, ""});
        if (expect_lambda >= 0)
          run.verdicts.push_back({"lambda_value", "lambda = omega_P + 2 omega_G", lv.lambda == expect_lambda, lv.lambda,
                                  expect_lambda, ""});
      } catch (const WingError& e) {
        run.verdicts.push_back({"wing_census", "mu(t) is eventually constant", false, nullptr, nullptr, e.what()});
      }
      if (!slices_csv.empty() || !svg_dir.empty()) {
        std::vector<SliceSet> slices;
        for (int k = 0;; ++k) {
          const double t = sc.t_min + k * sc.step;
          if (t > sc.t_max + 1e-12 * std::abs(sc.t_max)) break;
          for (double s : {-t, t})
            if (s < y.maxCoeff() - 2 * h && s > y.minCoeff() + 2 * h) slices.push_back(slice_y(m, s));
        }
        if (!slices_csv.empty()) {
          std::ofstream out(slices_csv);
          write_slices_csv(out, slices);
        }
        if (!svg_dir.empty()) {
          std::filesystem::create_directories(svg_dir);
          for (std::size_t k = 0; k < slices.size(); ++k) {
            std::ostringstream name;
            name << "slice_" << k << ".svg";
            std::ofstream out(std::filesystem::path(svg_dir) / name.str());
            write_slice_svg(out, slices[k]);
          }
        }
      }
    } else if (sub == rado) {
      const TriMeshd m = load(run, mesh_path);
      const RadoReport r = rado_critical_points(m, Vec3(nu[0], nu[1], nu[2]));
      run.result["rado"] = to_json(r, m);
      if (expect_N >= 0)
        run.verdicts.push_back({"saddle_count", "N = sum of saddle multiplicities", r.N == expect_N, r.N, expect_N, ""});
    } else if (sub == hset) {
      const TriMeshd m = differential_quantities(load(run, mesh_path));
      const HSource src = parse_h_source(source_text);
      const HSet hs = h_zero_set(m, src);
      const std::vector<EquatorArc> arcs = gauss_equator_image(hs, gap);
      Json j = to_json(hs, m);
      j["source"] = to_string(src);
      j["equator_arcs"] = to_json(arcs);
      run.result["hset"] = j;
      if (!equator_svg.empty()) {
        std::ofstream out(equator_svg);
        write_equator_svg(out, arcs);
      }
    } else if (sub == report) {
      const TriMeshd m = load(run, mesh_path);
      const Scan sc = parse_scan(scan_text);
      ropt.t_min = sc.t_min;
      ropt.t_max = sc.t_max;
      ropt.step = sc.step;
      ropt.h = c.h;
      ropt.h_source = parse_h_source(report_source);
      ropt.nu = Vec3(nu[0], nu[1], nu[2]);
      FullReport fr = run_report(m, ropt);
      run.result = std::move(fr.sections);
      run.verdicts = std::move(fr.verdicts);
    }
  } catch (const std::exception& e) {
    run.error = e.what();
  }
  return finish(run, c);
}
