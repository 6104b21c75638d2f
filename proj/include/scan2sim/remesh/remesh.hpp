#pragma once

#include "scan2sim/remesh/curvature.hpp"
#include "scan2sim/remesh/isotropic.hpp"
#include "scan2sim/remesh/quad_pairing.hpp"
#include "scan2sim/remesh/smoothing.hpp"

namespace scan2sim::remesh {

struct RemeshParams {
  double min_edge = 1.0;
  double max_edge = 4.0;
  double sensitivity = 1.0;
  int iterations = 5;
  int smooth_iterations = 2;
  double smooth_lambda = 0.5;
};

struct QuadMeshingResult {
  QuadDominantMesh mesh;
  double quad_fraction = 0.0;
  std::vector<std::string> diagnostics;
};

// Full curvature-adaptive pipeline: estimate curvature, derive the sizing field,
// isotropically remesh, pair triangles into quads, smooth.
inline QuadMeshingResult remesh_to_quads(const TriangleMesh& input, const RemeshParams& params) {
  CurvatureEstimate curvature = estimate_curvature(input);
  SizingField sizing =
      compute_sizing(curvature, params.min_edge, params.max_edge, params.sensitivity);
  RemeshResult iso = isotropic_remesh(input, sizing, params.iterations);
  QuadDominantMesh quads = pair_to_quads(iso.mesh);
  QuadMeshingResult result;
  result.mesh = laplacian_smooth(quads, params.smooth_iterations, params.smooth_lambda, true);
  result.quad_fraction = result.mesh.quad_fraction();
  result.diagnostics = std::move(curvature.warnings);
  result.diagnostics.insert(result.diagnostics.end(), iso.diagnostics.begin(),
                            iso.diagnostics.end());
  return result;
}

}  // namespace scan2sim::remesh
