#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "scan2sim/fea/solver.hpp"
#include "scan2sim/fidelity.hpp"
#include "scan2sim/io/geometry_io.hpp"
#include "scan2sim/quality.hpp"
#include "scan2sim/remesh/remesh.hpp"
#include "scan2sim/voxelize.hpp"

namespace scan2sim::pipeline {

// Exit codes shared by the CLI and the stage runners.
enum ExitCode : int {
  kOk = 0,
  kStageError = 1,
  kConfigError = 2,
  kGateFailed = 3,
};

struct BoxSelection {
  std::string name;
  Aabb region;
};

struct PipelineConfig {
  std::string input;
  std::string output_dir = "out";

  remesh::RemeshParams remesh_params;
  double voxel_size = 0.0;
  std::vector<BoxSelection> box_sets;

  quality::Thresholds thresholds;
  bool quality_per_element = false;  // include per-element rows in quality.json
  fea::Material material{10000.0, 0.3, 4.5e-7};
  fea::LoadCase load;
  fea::SolveSettings solve;

  std::string reference;       // chamfer reference mesh
  int samples = 100000;
  uint64_t seed = 0;

  std::string export_field = "von_mises";
  std::string colormap = "viridis";
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

namespace detail {

inline Vec3 vec3_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 3) throw ConfigError("expected a 3-element array");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace detail

// Single JSON-compatible config file; CLI flags override individual keys.
inline PipelineConfig parse_config(const nlohmann::json& j) {
  PipelineConfig cfg;
  try {
    cfg.input = j.value("input", cfg.input);
    cfg.output_dir = j.value("output_dir", cfg.output_dir);

    if (j.contains("remesh")) {
      const auto& r = j.at("remesh");
      cfg.remesh_params.min_edge = r.value("min_edge", cfg.remesh_params.min_edge);
      cfg.remesh_params.max_edge = r.value("max_edge", cfg.remesh_params.max_edge);
      cfg.remesh_params.sensitivity = r.value("sensitivity", cfg.remesh_params.sensitivity);
      cfg.remesh_params.iterations = r.value("iterations", cfg.remesh_params.iterations);
      cfg.remesh_params.smooth_iterations =
          r.value("smooth_iterations", cfg.remesh_params.smooth_iterations);
      cfg.remesh_params.smooth_lambda = r.value("smooth_lambda", cfg.remesh_params.smooth_lambda);
    }
    if (j.contains("voxel")) cfg.voxel_size = j.at("voxel").value("size", cfg.voxel_size);
    if (j.contains("quality")) {
      const auto& q = j.at("quality");
      cfg.thresholds.min_angle_hex_deg = q.value("min_angle_hex_deg", cfg.thresholds.min_angle_hex_deg);
      cfg.thresholds.min_angle_tet_deg = q.value("min_angle_tet_deg", cfg.thresholds.min_angle_tet_deg);
      cfg.thresholds.max_angle_deg = q.value("max_angle_deg", cfg.thresholds.max_angle_deg);
      cfg.thresholds.aspect_ratio = q.value("aspect_ratio", cfg.thresholds.aspect_ratio);
      cfg.thresholds.shape_factor = q.value("shape_factor", cfg.thresholds.shape_factor);
      cfg.quality_per_element = q.value("per_element", cfg.quality_per_element);
    }
    if (j.contains("material")) {
      const auto& m = j.at("material");
      cfg.material.young_modulus_mpa = m.value("young_modulus_mpa", cfg.material.young_modulus_mpa);
      cfg.material.poisson_ratio = m.value("poisson_ratio", cfg.material.poisson_ratio);
      cfg.material.density_kg_mm3 = m.value("density_kg_mm3", cfg.material.density_kg_mm3);
    }
    if (j.contains("load")) {
      const auto& l = j.at("load");
      if (l.contains("gravity_mm_s2")) cfg.load.gravity_mm_s2 = detail::vec3_from_json(l.at("gravity_mm_s2"));
      for (const auto& s : l.value("surface_loads", nlohmann::json::array())) {
        fea::SurfaceLoad sl;
        sl.node_set = s.at("set").get<std::string>();
        sl.total_force_n = detail::vec3_from_json(s.at("force_n"));
        std::string dist = s.value("distribution", "equal");
        if (dist == "equal") sl.distribution = fea::LoadDistribution::EqualPerNode;
        else if (dist == "area") sl.distribution = fea::LoadDistribution::AreaWeighted;
        else throw ConfigError("unknown load distribution '" + dist + "'");
        cfg.load.surface_loads.push_back(sl);
      }
      for (const auto& c : l.value("constraints", nlohmann::json::array())) {
        fea::Constraint con;
        con.node_set = c.at("set").get<std::string>();
        std::string dofs = c.value("dofs", "xyz");
        con.fixed_dof = {dofs.find('x') != std::string::npos, dofs.find('y') != std::string::npos,
                         dofs.find('z') != std::string::npos};
        cfg.load.constraints.push_back(con);
      }
    } else {
      // default case: self weight plus 500 N on the top layer, feet pinned
      cfg.load.gravity_mm_s2 = {0, 0, -9810.0};
      cfg.load.surface_loads.push_back({"top", {0, 0, -500.0}, fea::LoadDistribution::EqualPerNode});
      cfg.load.constraints.push_back({"bottom", {true, true, true}});
    }
    for (const auto& b : j.value("box_sets", nlohmann::json::array())) {
      BoxSelection sel;
      sel.name = b.at("name").get<std::string>();
      sel.region.expand(detail::vec3_from_json(b.at("lo")));
      sel.region.expand(detail::vec3_from_json(b.at("hi")));
      cfg.box_sets.push_back(sel);
    }
    if (j.contains("evaluate")) {
      const auto& e = j.at("evaluate");
      cfg.reference = e.value("reference", cfg.reference);
      cfg.samples = e.value("samples", cfg.samples);
      cfg.seed = e.value("seed", cfg.seed);
    }
    if (j.contains("export")) {
      const auto& e = j.at("export");
      cfg.export_field = e.value("field", cfg.export_field);
      cfg.colormap = e.value("colormap", cfg.colormap);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return cfg;
}

inline PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config parse: ") + e.what());
  }
  return parse_config(j);
}

inline void validate_for_stage(const PipelineConfig& cfg, const std::string& stage) {
  auto need_input = [&](const std::string& path, const std::string& what) {
    if (path.empty()) throw ConfigError(stage + ": missing " + what);
  };
  if (stage == "remesh" || stage == "pipeline" || stage == "chamfer") {
    need_input(cfg.input, "input mesh path");
    if (!std::filesystem::exists(cfg.input))
      throw ConfigError(stage + ": input '" + cfg.input + "' does not exist");
  }
  if (stage == "remesh" || stage == "pipeline") {
    const auto& p = cfg.remesh_params;
    if (!(0.0 < p.min_edge && p.min_edge < p.max_edge))
      throw ConfigError("remesh: need 0 < min_edge < max_edge");
    if (!(p.sensitivity > 0.0 && p.sensitivity <= 1.0))
      throw ConfigError("remesh: sensitivity must lie in (0, 1]");
    if (p.iterations < 1) throw ConfigError("remesh: iterations must be >= 1");
    if (!(p.smooth_lambda > 0.0 && p.smooth_lambda <= 1.0))
      throw ConfigError("remesh: smooth_lambda must lie in (0, 1]");
    if (p.smooth_iterations < 0) throw ConfigError("remesh: smooth_iterations must be >= 0");
  }
  if (stage == "voxelize" || stage == "pipeline") {
    if (cfg.voxel_size <= 0.0) throw ConfigError("voxelize: voxel size must be positive");
  }
  if (stage == "simulate" || stage == "pipeline") {
    cfg.material.validate();
    if (cfg.load.constraints.empty()) throw ConfigError("simulate: no constraints configured");
  }
  if (stage == "chamfer") {
    need_input(cfg.reference, "evaluate.reference mesh path");
    if (!std::filesystem::exists(cfg.reference))
      throw ConfigError("chamfer: reference '" + cfg.reference + "' does not exist");
    if (cfg.samples < 1) throw ConfigError("chamfer: samples must be >= 1");
  }
}

struct StageOutcome {
  int exit_code = kOk;
  nlohmann::json report;
};

namespace detail {

class StageRun {
 public:
  StageRun(const PipelineConfig& cfg, std::string stage) : cfg_(cfg), stage_(std::move(stage)) {
    std::filesystem::create_directories(cfg.output_dir);
    start_ = std::chrono::steady_clock::now();
    report_["stage"] = stage_;
    report_["inputs"] = nlohmann::json::array();
    report_["outputs"] = nlohmann::json::array();
  }

  std::string path(const std::string& name) const {
    return (std::filesystem::path(cfg_.output_dir) / name).string();
  }
  void input(const std::string& p) { report_["inputs"].push_back(p); }
  void output(const std::string& p) { report_["outputs"].push_back(p); }
  nlohmann::json& data() { return report_["data"]; }

  StageOutcome finish(int code, const std::string& status, const std::string& error = {}) {
    auto elapsed = std::chrono::steady_clock::now() - start_;
    report_["status"] = status;
    report_["duration_ms"] =
        std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count();
    if (!error.empty()) report_["error"] = error;
    std::ofstream out(path("report_" + stage_ + ".json"));
    out << report_.dump(2) << "\n";
    return {code, report_};
  }

 private:
  const PipelineConfig& cfg_;
  std::string stage_;
  std::chrono::steady_clock::time_point start_;
  nlohmann::json report_;
};

template <typename Body>
inline StageOutcome run_stage(const PipelineConfig& cfg, const std::string& stage, Body&& body) {
  StageRun run(cfg, stage);
  try {
    validate_for_stage(cfg, stage);
    int code = body(run);
    return run.finish(code, code == kOk ? "ok" : (code == kGateFailed ? "gate_failed" : "error"));
  } catch (const ConfigError& e) {
    return run.finish(kConfigError, "error", e.what());
  } catch (const std::exception& e) {
    return run.finish(kStageError, "error", e.what());
  }
}

inline VolumeMesh load_volume_artifact(StageRun& run, const std::string& file) {
  std::string p = run.path(file);
  if (!std::filesystem::exists(p))
    throw ConfigError("missing volume artifact '" + p + "' (run the voxelize stage first)");
  run.input(p);
  std::ifstream in(p);
  return io::read_inp(in);
}

}  // namespace detail

inline StageOutcome run_remesh(const PipelineConfig& cfg) {
  return detail::run_stage(cfg, "remesh", [&](detail::StageRun& run) {
    run.input(cfg.input);
    TriangleMesh input = io::load_surface(cfg.input);
    remesh::QuadMeshingResult result = remesh::remesh_to_quads(input, cfg.remesh_params);

    io::write_file(run.path("remeshed.obj"),
                   [&](std::ostream& o) { io::write_obj(o, result.mesh); });
    run.output(run.path("remeshed.obj"));
    io::write_file(run.path("remeshed.vtk"),
                   [&](std::ostream& o) { io::write_vtk(o, result.mesh); });
    run.output(run.path("remeshed.vtk"));

    run.data() = {{"quad_fraction", result.quad_fraction},
                  {"quads", result.mesh.quads.size()},
                  {"triangles", result.mesh.triangles.size()},
                  {"vertices", result.mesh.vertices.size()},
                  {"diagnostics", result.diagnostics}};
    return kOk;
  });
}

inline StageOutcome run_voxelize(const PipelineConfig& cfg) {
  return detail::run_stage(cfg, "voxelize", [&](detail::StageRun& run) {
    std::string source = run.path("remeshed.obj");
    if (!std::filesystem::exists(source)) {
      // standalone use: fall back to the raw input surface
      if (cfg.input.empty() || !std::filesystem::exists(cfg.input))
        throw ConfigError("voxelize: no remeshed.obj artifact and no input mesh");
      source = cfg.input;
    }
    run.input(source);
    TriangleMesh surface = io::load_surface(source);
    VolumeMesh volume = voxelize(surface, cfg.voxel_size);
    select_nodes(volume, "bottom", NodePredicate::ZMinLayer, cfg.voxel_size);
    select_nodes(volume, "top", NodePredicate::ZMaxLayer, cfg.voxel_size);
    for (const auto& box : cfg.box_sets)
      select_nodes(volume, box.name, NodePredicate::Box, cfg.voxel_size, box.region);

    io::write_file(run.path("volume.inp"), [&](std::ostream& o) {
      io::write_inp(o, volume, cfg.material, cfg.load, "scan2sim voxel mesh");
    });
    run.output(run.path("volume.inp"));
    io::write_file(run.path("volume.vtk"), [&](std::ostream& o) { io::write_vtk(o, volume); });
    run.output(run.path("volume.vtk"));

    run.data() = {{"hex_elements", volume.hex_elements.size()},
                  {"nodes", volume.nodes.size()},
                  {"voxel_size", cfg.voxel_size}};
    return kOk;
  });
}

inline StageOutcome run_audit(const PipelineConfig& cfg) {
  return detail::run_stage(cfg, "audit", [&](detail::StageRun& run) {
    VolumeMesh volume = detail::load_volume_artifact(run, "volume.inp");
    quality::QualityReport report = quality::audit(volume, cfg.thresholds);

    io::write_file(run.path("quality.json"), [&](std::ostream& o) {
      o << quality::report_to_json(report, cfg.quality_per_element).dump(2) << "\n";
    });
    run.output(run.path("quality.json"));
    io::write_file(run.path("quality.txt"),
                   [&](std::ostream& o) { o << quality::report_to_text(report); });
    run.output(run.path("quality.txt"));

    run.data() = {{"gate_pass", report.gate_pass},
                  {"hex_total", report.hex.total},
                  {"tet_total", report.tet.total}};
    return report.gate_pass ? kOk : kGateFailed;
  });
}

inline StageOutcome run_simulate(const PipelineConfig& cfg) {
  return detail::run_stage(cfg, "simulate", [&](detail::StageRun& run) {
    VolumeMesh volume = detail::load_volume_artifact(run, "volume.inp");
    fea::FieldResult result = fea::solve_static(volume, cfg.material, cfg.load, cfg.solve);

    std::vector<ScalarField> fields;
    static const char* comp[6] = {"xx", "yy", "zz", "xy", "yz", "zx"};
    for (int c = 0; c < 6; ++c) {
      ScalarField stress{std::string("stress_") + comp[c], FieldAssociation::PerElement, {}};
      ScalarField strain{std::string("strain_") + comp[c], FieldAssociation::PerElement, {}};
      for (int e = 0; e < volume.element_count(); ++e) {
        stress.values.push_back(result.stress_mpa[e][c]);
        strain.values.push_back(result.strain[e][c]);
      }
      fields.push_back(std::move(stress));
      fields.push_back(std::move(strain));
    }
    ScalarField vm{"von_mises", FieldAssociation::PerElement,
                   std::vector<double>(result.von_mises_mpa)};
    fields.push_back(vm);
    fields.push_back(fea::element_to_nodal(vm, volume));
    fields.back().name = "von_mises_nodal";

    std::vector<VectorField> vfields;
    vfields.push_back({"displacement", FieldAssociation::PerNode, result.displacement_mm});
    vfields.push_back({"reaction", FieldAssociation::PerNode, result.reaction_n});

    io::write_file(run.path("simulation.vtk"),
                   [&](std::ostream& o) { io::write_vtk(o, volume, fields, vfields); });
    run.output(run.path("simulation.vtk"));
    io::write_file(run.path("model.inp"), [&](std::ostream& o) {
      io::write_inp(o, volume, cfg.material, cfg.load, "scan2sim simulation model");
    });
    run.output(run.path("model.inp"));

    double max_disp = 0.0, max_vm = 0.0;
    for (const auto& u : result.displacement_mm) max_disp = std::max(max_disp, norm(u));
    for (double v : result.von_mises_mpa) max_vm = std::max(max_vm, v);
    Vec3 reactions{0, 0, 0};
    for (const auto& r : result.reaction_n) reactions += r;
    run.data() = {{"max_displacement_mm", max_disp},
                  {"max_von_mises_mpa", max_vm},
                  {"reaction_sum_n", {reactions.x, reactions.y, reactions.z}},
                  {"solver_iterations", result.iterations},
                  {"solver_residual", result.residual}};
    return kOk;
  });
}

inline StageOutcome run_export(const PipelineConfig& cfg) {
  return detail::run_stage(cfg, "export", [&](detail::StageRun& run) {
    std::string source = run.path("simulation.vtk");
    if (!std::filesystem::exists(source))
      throw ConfigError("export: missing simulation.vtk (run the simulate stage first)");
    run.input(source);
    std::ifstream in(source);
    io::VtkData data = io::read_vtk(in);
    VolumeMesh volume = data.to_volume_mesh();

    // locate the requested field; per-element fields are averaged to nodes
    ScalarField nodal;
    bool found = false;
    for (const auto& f : data.fields) {
      if (f.name != cfg.export_field) continue;
      nodal = f.association == FieldAssociation::PerNode ? f : fea::element_to_nodal(f, volume);
      found = true;
      break;
    }
    if (!found) throw ConfigError("export: field '" + cfg.export_field + "' not in simulation.vtk");

    TriangleMesh shell = extract_boundary_surface(volume);
    // compact to referenced vertices so the asset carries no orphan data
    std::vector<int> remap(shell.vertices.size(), -1);
    TriangleMesh compact;
    ScalarField field{nodal.name, FieldAssociation::PerNode, {}};
    for (auto& f : shell.faces) {
      for (int& v : f) {
        if (remap[v] < 0) {
          remap[v] = compact.vertex_count();
          compact.vertices.push_back(shell.vertices[v]);
          field.values.push_back(nodal.values[v]);
        }
        v = remap[v];
      }
      compact.faces.push_back(f);
    }

    io::write_file(run.path("colored.glb"), [&](std::ostream& o) {
      io::write_gltf_colored(o, compact, field, io::Colormap::named(cfg.colormap));
    }, true);
    run.output(run.path("colored.glb"));
    run.data() = {{"field", cfg.export_field},
                  {"colormap", cfg.colormap},
                  {"triangles", compact.faces.size()}};
    return kOk;
  });
}

inline StageOutcome run_chamfer(const PipelineConfig& cfg) {
  return detail::run_stage(cfg, "chamfer", [&](detail::StageRun& run) {
    run.input(cfg.input);
    run.input(cfg.reference);
    TriangleMesh reconstructed = io::load_surface(cfg.input);
    TriangleMesh reference = io::load_surface(cfg.reference);
    fidelity::FidelityReport report =
        fidelity::evaluate_pair(reconstructed, reference, cfg.samples, cfg.seed);

    nlohmann::json j{{"cd", report.cd},
                     {"term_p_to_q", report.term_p_to_q},
                     {"term_q_to_p", report.term_q_to_p},
                     {"samples", report.samples},
                     {"seed", report.seed}};
    io::write_file(run.path("chamfer.json"),
                   [&](std::ostream& o) { o << j.dump(2) << "\n"; });
    run.output(run.path("chamfer.json"));
    run.data() = j;
    return kOk;
  });
}

// remesh -> voxelize -> audit (gate) -> simulate -> export. The audit gate stops
// the chain before any simulation artifact is produced.
inline StageOutcome run_pipeline(const PipelineConfig& cfg) {
  return detail::run_stage(cfg, "pipeline", [&](detail::StageRun& run) {
    struct Step {
      const char* name;
      StageOutcome (*fn)(const PipelineConfig&);
    };
    const Step steps[] = {{"remesh", run_remesh},
                          {"voxelize", run_voxelize},
                          {"audit", run_audit},
                          {"simulate", run_simulate},
                          {"export", run_export}};
    nlohmann::json stage_summaries = nlohmann::json::array();
    for (const auto& step : steps) {
      StageOutcome outcome = step.fn(cfg);
      stage_summaries.push_back({{"stage", step.name}, {"status", outcome.report["status"]}});
      run.data()["stages"] = stage_summaries;
      for (const auto& out : outcome.report["outputs"]) run.output(out.get<std::string>());
      if (outcome.exit_code != kOk) return outcome.exit_code;
    }
    return static_cast<int>(kOk);
  });
}

inline StageOutcome run_subcommand(const std::string& name, const PipelineConfig& cfg) {
  if (name == "remesh") return run_remesh(cfg);
  if (name == "voxelize") return run_voxelize(cfg);
  if (name == "audit") return run_audit(cfg);
  if (name == "simulate") return run_simulate(cfg);
  if (name == "chamfer") return run_chamfer(cfg);
  if (name == "export") return run_export(cfg);
  if (name == "pipeline") return run_pipeline(cfg);
  throw ConfigError("unknown subcommand '" + name + "'");
}

}  // namespace scan2sim::pipeline
