#pragma once

#include "json.hpp"
#include "tslab/entropy.hpp"
#include "tslab/pde.hpp"
#include "tslab/rado.hpp"
#include "tslab/slab.hpp"
#include "tslab/wings.hpp"

#include <string>
#include <utility>
#include <vector>

namespace tslab {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kReportSchema = "tslab.report/1";

using Json = nlohmann::ordered_json;

Json to_json(const Vec3& v);
Json to_json(const SlabFit<double>& fit);
Json to_json(const EntropyResult& r);
Json to_json(const WingReport& r);
Json to_json(const LambdaVerdict& v);
Json to_json(const SolveReport& r);
Json to_json(const SpineCheck& s);
Json to_json(const TangentSplit& s);
Json to_json(const std::vector<EquatorArc>& arcs);
Json to_json(const RadoReport& r, const TriMeshd& mesh);
Json to_json(const HSet& s, const TriMeshd& mesh);

struct Verdict {
  std::string name;
  std::string anchor;  // statement the check stands in for
  bool pass = false;
  Json measured, expected;
  std::string note;
};
Json to_json(const Verdict& v);

struct Provenance {
  std::vector<std::string> command;
  std::vector<std::pair<std::string, std::string>> inputs;  // path, sha256
  Json params = Json::object();
};
/// Schema, tool version, subcommand, command line, input hashes and parameters.
Json report_header(const std::string& subcommand, const Provenance& p);

struct ResidualSummary {
  double max = 0, quantile = 0;
  double q = 0.95;
  long vertices = 0;
};
/// Residual over reliable vertices: the maximum and the q-quantile.
ResidualSummary residual_summary(const TriMeshd& mesh_with_curvature, double q = 0.95);

struct ReportOptions {
  double residual_tol = 0.05;
  double residual_quantile = 0.95;
  double t_min = 0.5, t_max = 0, step = 0;  // t_max = 0: 0.9 of the smaller y-reach; step = 0: 20 offsets
  bool entropy = false;
  double entropy_tol = 0.05;
  SearchOptions search;
  HSource h_source = HSource::translator;
  Vec3 nu = Vec3::UnitY();
  double h = 0;  // spacing for tolerances; 0: median edge length
};

struct FullReport {
  Json sections = Json::object();
  std::vector<Verdict> verdicts;
  bool pass() const;
};

/// Residual, slab width, wing census, optional entropy, Rado and H-set summaries.
FullReport run_report(const TriMeshd& mesh, const ReportOptions& opt = {});

}  // namespace tslab
