#include "doctest.h"

#include "fixtures.hpp"
#include "json.hpp"
#include "tslab/io.hpp"

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace tslab;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path& workdir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "tslab_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string path(const std::string& name) { return (workdir() / name).string(); }

int run_cli(const std::string& args) {
  const std::string cmd = std::string(TSLAB_CLI_PATH) + " " + args + " >" + path("stdout.txt") + " 2>" + path("stderr.txt");
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

json load(const std::string& name) { return json::parse(slurp(path(name))); }

const json* verdict(const json& doc, const std::string& name) {
  for (const json& v : doc["verdicts"])
    if (v["name"] == name) return &v;
  return nullptr;
}

const std::string& sphere() {
  static const std::string p = [] {
    write_obj(fixtures::icosphere(1, 4), path("sphere.obj"));
    return path("sphere.obj");
  }();
  return p;
}

}  // namespace

TEST_CASE("gen grim reaper then wings") {
  REQUIRE(run_cli("gen --family grim --zeta 0 --h 0.01 --out " + path("gr.obj") + " --json " + path("gen.json")) == 0);
  const json g = load("gen.json");
  CHECK(g["schema"] == "tslab.report/1");
  CHECK(g["params"]["h"] == 0.01);
  CHECK(g["result"]["sha256"].get<std::string>().size() == 64);

  REQUIRE(run_cli("wings " + path("gr.obj") + " --scan 5:40:5 --json " + path("wings.json")) == 0);
  const json w = load("wings.json");
  CHECK(w["result"]["wings"]["plus"]["omega"] == 1);
  CHECK(w["result"]["wings"]["minus"]["omega"] == 1);
  CHECK(w["result"]["wings"]["plus"]["omega_G"] == 1);
  CHECK(w["result"]["lambda"]["lambda_hat"] == 2);
  CHECK(w["params"]["scan"] == json::array({5.0, 40.0, 5.0}));
  CHECK(w["inputs"][0]["sha256"] == g["result"]["sha256"]);
  CHECK(w["pass"] == true);

  CHECK(run_cli("wings " + path("gr.obj") + " --scan 5:40:5 --expect-lambda 3 --quiet --json " + path("w3.json")) == 1);
  CHECK(verdict(load("w3.json"), "lambda_value")->at("pass") == false);
}

TEST_CASE("wings writes slices") {
  write_obj(fixtures::graph_mesh([](double x, double) { return 0 * x; }, -1, 1, -6, 6, 0.25), path("flat.obj"));
  run_cli("wings " + path("flat.obj") + " --scan 1:5:1 --quiet --csv " + path("slices.csv") + " --svg-dir " +
        path("svg") + " --json " + path("flat.json"));
  const std::string csv = slurp(path("slices.csv"));
  CHECK(csv.rfind("t,component_id,point_index,x,z,exit_start,exit_end\n", 0) == 0);
  int files = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(path("svg"))) ++files;
  CHECK(files == 10);
}

TEST_CASE("entropy on the cylinder") {
  REQUIRE(run_cli("gen --family cylinder --h 0.05 --quiet --out " + path("cyl.obj") + " --json " + path("cg.json")) == 0);
  REQUIRE(run_cli("entropy " + path("cyl.obj") + " --svg " + path("heat.svg") + " --json " + path("cyl.json")) == 0);
  const double F = load("cyl.json")["result"]["entropy"]["lambda_hat"];
  CHECK(std::abs(F - 1.520350) <= 2e-3);
  CHECK(slurp(path("heat.svg")).find("<rect") != std::string::npos);
  CHECK(run_cli("entropy " + path("cyl.obj") + " --expect 1.6 --tol 1e-3 --quiet --json " + path("cyl2.json")) == 1);
}

TEST_CASE("report on a sphere fails the residual verdict") {
  CHECK(run_cli("report " + sphere() + " --json " + path("sphere.json")) == 1);
  const json r = load("sphere.json");
  REQUIRE(verdict(r, "translator_residual"));
  CHECK(verdict(r, "translator_residual")->at("pass") == false);
  CHECK(r["exit_code"] == 1);
  CHECK(r["result"].contains("slab"));
  CHECK(r["result"].contains("rado"));
  CHECK(r["result"].contains("hset"));
  for (const json& v : r["verdicts"]) CHECK(!v["anchor"].get<std::string>().empty());
}

TEST_CASE("report on a grim reaper passes") {
  REQUIRE(fs::exists(path("gr.obj")));
  CHECK(run_cli("report " + path("gr.obj") + " --quiet --json " + path("gr_report.json")) == 0);
  const json r = load("gr_report.json");
  CHECK(r["result"]["lambda"]["lambda_hat"] == 2);
  CHECK(std::abs(r["result"]["slab"]["width"].get<double>() - 3.14159) < 0.02);
}

TEST_CASE("parse errors and help") {
  CHECK(run_cli("wings " + sphere() + " --bogus 1") == 2);
  CHECK(slurp(path("stderr.txt")).find("Usage") != std::string::npos);
  CHECK(run_cli("") == 2);
  CHECK(run_cli("frobnicate") == 2);
  CHECK(run_cli("entropy " + path("missing.obj")) == 2);
  CHECK(run_cli("solve torus") == 2);
  CHECK(run_cli("--help") == 0);
  CHECK(run_cli("wings --help") == 0);
}

TEST_CASE("JSON is bitwise identical across runs and thread counts") {
  const std::string args = "rado " + sphere() + " --quiet --json " + path("det.json");
  REQUIRE(run_cli(args) == 0);
  const std::string a = slurp(path("det.json"));
  REQUIRE(run_cli(args) == 0);
  CHECK(slurp(path("det.json")) == a);

  REQUIRE(run_cli("report " + sphere() + " --quiet --json " + path("det.json")) == 1);
  const std::string b = slurp(path("det.json"));
  ::setenv("TSLAB_THREADS", "1", 1);
  REQUIRE(run_cli("report " + sphere() + " --quiet --json " + path("det.json")) == 1);
  ::unsetenv("TSLAB_THREADS");
  CHECK(slurp(path("det.json")) == b);
}

TEST_CASE("config file mirrors flags and flags win") {
  std::ofstream(path("cfg.ini")) << "quiet=true\nh=0.3\nrado.nu=0,0,1\n";
  REQUIRE(run_cli("--config " + path("cfg.ini") + " rado " + sphere() + " --json " + path("cfg.json")) == 0);
  json r = load("cfg.json");
  CHECK(r["params"]["h"] == 0.3);
  CHECK(r["params"]["nu"] == json::array({0.0, 0.0, 1.0}));
  CHECK(r["result"]["rado"]["extrema"].size() == 2);
  CHECK(slurp(path("stderr.txt")).empty());

  REQUIRE(run_cli("--config " + path("cfg.ini") + " --h 0.2 rado " + sphere() + " --nu 1,0,0 --json " + path("cfg.json")) == 0);
  r = load("cfg.json");
  CHECK(r["params"]["h"] == 0.2);
  CHECK(r["params"]["nu"] == json::array({1.0, 0.0, 0.0}));
}

TEST_CASE("rado and hset") {
  CHECK(run_cli("rado " + sphere() + " --expect 0 --quiet --json " + path("rado.json")) == 0);
  CHECK(load("rado.json")["result"]["rado"]["N"] == 0);
  CHECK(run_cli("rado " + sphere() + " --expect 1 --quiet --json " + path("rado.json")) == 1);

  CHECK(run_cli("hset " + sphere() + " --svg " + path("eq.svg") + " --quiet --json " + path("hset.json")) == 0);
  const json h = load("hset.json");
  CHECK(h["result"]["hset"]["identically_zero"] == false);
  CHECK(h["result"]["hset"]["points"] == 0);
  CHECK(slurp(path("eq.svg")).find("<svg") != std::string::npos);
  CHECK(run_cli("hset " + sphere() + " --source gauss --quiet --json " + path("hset.json")) == 1);
  CHECK(load("hset.json").contains("error"));
}

TEST_CASE("solve embeds the SolveReport") {
  CHECK(run_cli("solve delta-wing --w 2 --L 8 --h 0.2 --quiet --out " + path("dw.obj") + " --field " + path("dw_field") +
              " --json " + path("dw.json")) == 0);
  json r = load("dw.json");
  CHECK(r["result"]["solve"]["converged"] == true);
  CHECK(fs::exists(path("dw.obj")));
  CHECK(fs::exists(path("dw_field.csv")));

  CHECK(run_cli("solve delta-wing --w 2 --L 8 --h 0.2 --max-iter 1 --quiet --json " + path("dw1.json")) == 1);
  r = load("dw1.json");
  CHECK(r["result"]["solve"]["converged"] == false);
  CHECK(r["result"]["solve"]["iterations"] <= 1);
  CHECK(r["pass"] == false);
}
