#include <catch2/catch.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "scan2sim/io/geometry_io.hpp"
#include "scan2sim/pipeline.hpp"
#include "support/fixtures.hpp"
#include "support/tmpdir.hpp"

using namespace scan2sim;
namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
  std::string cmd = std::string(SCAN2SIM_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

std::string write_config(const std::string& name, const nlohmann::json& j) {
  std::string path = fixtures::tmp_path(name);
  std::ofstream out(path);
  out << j.dump(2);
  return path;
}

std::string sphere_obj() {
  static std::string path = [] {
    std::string p = fixtures::tmp_path("pipeline_sphere.obj");
    io::save_surface(p, fixtures::icosphere(2, 10.0));
    return p;
  }();
  return path;
}

nlohmann::json base_config(const std::string& outdir) {
  return {
      {"input", sphere_obj()},
      {"output_dir", outdir},
      {"remesh", {{"min_edge", 1.5}, {"max_edge", 3.0}, {"iterations", 3}}},
      {"voxel", {{"size", 2.0}}},
      {"material",
       {{"young_modulus_mpa", 10000.0}, {"poisson_ratio", 0.3}, {"density_kg_mm3", 4.5e-7}}},
      {"load",
       {{"gravity_mm_s2", {0.0, 0.0, -9810.0}},
        {"surface_loads",
         nlohmann::json::array(
             {{{"set", "top"}, {"force_n", {0.0, 0.0, -500.0}}, {"distribution", "equal"}}})},
        {"constraints", nlohmann::json::array({{{"set", "bottom"}, {"dofs", "xyz"}}})}}},
      {"evaluate", {{"reference", sphere_obj()}, {"samples", 2000}, {"seed", 42}}},
  };
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("cli: audit on the 8-hex cube reports zero violations and exits 0") {
  std::string outdir = fixtures::tmp_path("cli_audit_cube");
  fs::remove_all(outdir);
  std::string cube = fixtures::tmp_path("cube.obj");
  io::save_surface(cube, fixtures::box_mesh({0, 0, 0}, {1, 1, 1}));

  auto cfg = base_config(outdir);
  cfg["input"] = cube;
  cfg["voxel"]["size"] = 0.5;
  std::string cfg_path = write_config("audit_cube.json", cfg);

  REQUIRE(run_cli("voxelize --config " + cfg_path) == 0);
  REQUIRE(run_cli("audit --config " + cfg_path) == 0);

  auto quality = nlohmann::json::parse(slurp(outdir + "/quality.json"));
  REQUIRE(quality["hexahedral"]["total_elements"] == 8);
  REQUIRE(quality["hexahedral"]["aspect_ratio_over_limit"] == 0);
  REQUIRE(quality["gate_pass"] == true);
}

TEST_CASE("cli: gate failure aborts the pipeline with exit 3 and no simulation artifacts") {
  std::string outdir = fixtures::tmp_path("cli_gate_fail");
  fs::remove_all(outdir);
  auto cfg = base_config(outdir);
  // impossible threshold: even perfect voxels violate an aspect-ratio gate below 1
  cfg["quality"] = {{"aspect_ratio", 0.99}};
  std::string cfg_path = write_config("gate_fail.json", cfg);

  REQUIRE(run_cli("pipeline --config " + cfg_path) == 3);
  REQUIRE(fs::exists(outdir + "/volume.inp"));
  REQUIRE(fs::exists(outdir + "/quality.json"));
  REQUIRE_FALSE(fs::exists(outdir + "/simulation.vtk"));
  REQUIRE_FALSE(fs::exists(outdir + "/model.inp"));
  REQUIRE_FALSE(fs::exists(outdir + "/colored.glb"));

  auto report = nlohmann::json::parse(slurp(outdir + "/report_pipeline.json"));
  REQUIRE(report["status"] == "gate_failed");
}

TEST_CASE("cli: chamfer of a mesh against itself reports cd = 0 and exits 0") {
  std::string outdir = fixtures::tmp_path("cli_chamfer");
  fs::remove_all(outdir);
  std::string cfg_path = write_config("chamfer_self.json", base_config(outdir));

  REQUIRE(run_cli("chamfer --config " + cfg_path) == 0);
  auto report = nlohmann::json::parse(slurp(outdir + "/chamfer.json"));
  REQUIRE(report["cd"] == 0.0);
  REQUIRE(report["samples"] == 2000);
  REQUIRE(report["seed"] == 42);
}

TEST_CASE("cli: full pipeline succeeds and produces the union of stage artifacts") {
  std::string outdir = fixtures::tmp_path("cli_full");
  fs::remove_all(outdir);
  std::string cfg_path = write_config("full.json", base_config(outdir));

  REQUIRE(run_cli("pipeline --config " + cfg_path) == 0);
  for (const char* artifact :
       {"remeshed.obj", "remeshed.vtk", "volume.inp", "volume.vtk", "quality.json", "quality.txt",
        "simulation.vtk", "model.inp", "colored.glb"})
    REQUIRE(fs::exists(outdir + "/" + std::string(artifact)));

  auto report = nlohmann::json::parse(slurp(outdir + "/report_pipeline.json"));
  REQUIRE(report["status"] == "ok");
  REQUIRE(report["data"]["stages"].size() == 5);
}

TEST_CASE("cli: identical config produces bitwise-identical artifacts") {
  std::string out_a = fixtures::tmp_path("cli_det_a");
  std::string out_b = fixtures::tmp_path("cli_det_b");
  fs::remove_all(out_a);
  fs::remove_all(out_b);
  std::string cfg_a = write_config("det_a.json", base_config(out_a));
  std::string cfg_b = write_config("det_b.json", base_config(out_b));

  REQUIRE(run_cli("pipeline --config " + cfg_a) == 0);
  REQUIRE(run_cli("pipeline --config " + cfg_b) == 0);
  for (const char* artifact : {"remeshed.obj", "remeshed.vtk", "volume.inp", "volume.vtk",
                               "quality.json", "quality.txt", "simulation.vtk", "model.inp",
                               "colored.glb"}) {
    INFO(artifact);
    REQUIRE(slurp(out_a + "/" + artifact) == slurp(out_b + "/" + artifact));
  }
}

TEST_CASE("cli: invalid config exits 2 and still writes the stage report") {
  std::string outdir = fixtures::tmp_path("cli_bad_config");
  fs::remove_all(outdir);
  auto cfg = base_config(outdir);
  cfg["input"] = "/nonexistent/mesh.obj";
  std::string cfg_path = write_config("bad.json", cfg);

  REQUIRE(run_cli("pipeline --config " + cfg_path) == 2);
  auto report = nlohmann::json::parse(slurp(outdir + "/report_pipeline.json"));
  REQUIRE(report["status"] == "error");
  REQUIRE(report.contains("error"));
}

TEST_CASE("cli: flags override config keys") {
  std::string outdir = fixtures::tmp_path("cli_override");
  fs::remove_all(outdir);
  auto cfg = base_config(fixtures::tmp_path("cli_override_ignored"));
  cfg["voxel"]["size"] = 0.0;  // invalid in the file, fixed by the flag
  std::string cfg_path = write_config("override.json", cfg);

  int rc = run_cli("voxelize --config " + cfg_path + " --input " + sphere_obj() +
                   " --output-dir " + outdir + " --voxel-size 2.5");
  REQUIRE(rc == 0);
  REQUIRE(fs::exists(outdir + "/volume.inp"));
}

TEST_CASE("pipeline stage report envelope carries the shared keys") {
  std::string outdir = fixtures::tmp_path("cli_envelope");
  fs::remove_all(outdir);
  pipeline::PipelineConfig cfg;
  cfg.input = sphere_obj();
  cfg.output_dir = outdir;
  cfg.remesh_params = {1.5, 3.0, 1.0, 3, 2, 0.5};
  auto outcome = pipeline::run_remesh(cfg);
  REQUIRE(outcome.exit_code == 0);
  for (const char* key : {"stage", "status", "duration_ms", "inputs", "outputs"})
    REQUIRE(outcome.report.contains(key));
  REQUIRE(outcome.report["stage"] == "remesh");
  REQUIRE(outcome.report["data"]["quad_fraction"].get<double>() >= 0.9);
}

TEST_CASE("pipeline: simulate reloads the voxel artifact and balances reactions") {
  std::string outdir = fixtures::tmp_path("pipe_sim");
  fs::remove_all(outdir);
  pipeline::PipelineConfig cfg;
  cfg.input = sphere_obj();
  cfg.output_dir = outdir;
  cfg.remesh_params = {1.5, 3.0, 1.0, 3, 2, 0.5};
  cfg.voxel_size = 2.0;
  cfg.load.gravity_mm_s2 = {0, 0, -9810.0};
  cfg.load.surface_loads.push_back({"top", {0, 0, -500.0}, fea::LoadDistribution::EqualPerNode});
  cfg.load.constraints.push_back({"bottom", {true, true, true}});

  REQUIRE(pipeline::run_remesh(cfg).exit_code == 0);
  REQUIRE(pipeline::run_voxelize(cfg).exit_code == 0);
  auto outcome = pipeline::run_simulate(cfg);
  REQUIRE(outcome.exit_code == 0);
  auto sums = outcome.report["data"]["reaction_sum_n"];
  // reactions balance gravity + 500 N within solver tolerance
  double weight_plus_load = 500.0;  // z reactions exceed this by the self weight
  REQUIRE(std::abs(sums[0].get<double>()) < 1e-6);
  REQUIRE(std::abs(sums[1].get<double>()) < 1e-6);
  REQUIRE(sums[2].get<double>() > weight_plus_load);
}

TEST_CASE("pipeline: export produces a glb for a nodal field") {
  std::string outdir = fixtures::tmp_path("pipe_export");
  fs::remove_all(outdir);
  pipeline::PipelineConfig cfg;
  cfg.input = sphere_obj();
  cfg.output_dir = outdir;
  cfg.remesh_params = {1.5, 3.0, 1.0, 3, 2, 0.5};
  cfg.voxel_size = 2.0;
  cfg.load.gravity_mm_s2 = {0, 0, -9810.0};
  cfg.load.constraints.push_back({"bottom", {true, true, true}});

  REQUIRE(pipeline::run_remesh(cfg).exit_code == 0);
  REQUIRE(pipeline::run_voxelize(cfg).exit_code == 0);
  REQUIRE(pipeline::run_simulate(cfg).exit_code == 0);
  auto outcome = pipeline::run_export(cfg);
  REQUIRE(outcome.exit_code == 0);
  REQUIRE(fs::exists(outdir + "/colored.glb"));
  std::string glb = slurp(outdir + "/colored.glb");
  REQUIRE(glb.size() > 100);
  REQUIRE(glb.substr(0, 4) == "glTF");
}
