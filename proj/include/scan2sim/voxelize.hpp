#pragma once

#include <array>
#include <cmath>
#include <string>
#include <unordered_map>
#include <vector>

#include "scan2sim/core.hpp"
#include "scan2sim/mesh.hpp"
#include "scan2sim/parallel.hpp"
#include "scan2sim/winding.hpp"

namespace scan2sim {

struct VoxelGrid {
  Vec3 origin;
  double voxel_size = 0.0;
  std::array<int, 3> dims{0, 0, 0};
  std::vector<uint8_t> occupancy;  // x-major, then y, then z (lexicographic in (x,y,z))

  size_t cell_count() const {
    return static_cast<size_t>(dims[0]) * dims[1] * dims[2];
  }
  size_t cell_index(int i, int j, int k) const {
    return (static_cast<size_t>(i) * dims[1] + j) * dims[2] + k;
  }
  Vec3 cell_center(int i, int j, int k) const {
    return origin + Vec3{(i + 0.5) * voxel_size, (j + 0.5) * voxel_size, (k + 0.5) * voxel_size};
  }
};

// Classifies every cell center against the surface. Grid is anchored at the mesh
// bounding-box minimum; classification is parallel over cells.
inline VoxelGrid classify_voxels(const TriangleMesh& mesh, double voxel_size) {
  mesh.validate();
  Aabb box = mesh.bounds();
  if (voxel_size <= 0.0) throw MeshError("voxel_size must be positive");
  if (voxel_size > box.diagonal()) throw MeshError("voxel_size exceeds bounding-box diagonal");

  VoxelGrid grid;
  grid.origin = box.lo;
  grid.voxel_size = voxel_size;
  Vec3 ext = box.extent();
  for (int d = 0; d < 3; ++d)
    grid.dims[d] = std::max(1, static_cast<int>(std::ceil(ext[d] / voxel_size - 1e-12)));
  grid.occupancy.assign(grid.cell_count(), 0);

  parallel_for(0, static_cast<int64_t>(grid.cell_count()), [&](int64_t c) {
    int k = static_cast<int>(c % grid.dims[2]);
    int j = static_cast<int>((c / grid.dims[2]) % grid.dims[1]);
    int i = static_cast<int>(c / (static_cast<int64_t>(grid.dims[1]) * grid.dims[2]));
    grid.occupancy[c] = point_inside(mesh, grid.cell_center(i, j, k)) ? 1 : 0;
  });
  return grid;
}

// Turns occupied cells into hex8 elements with shared corner nodes. Nodes are
// numbered lexicographically by their (x,y,z) lattice coordinates.
inline VolumeMesh grid_to_mesh(const VoxelGrid& grid) {
  const int nx = grid.dims[0], ny = grid.dims[1], nz = grid.dims[2];
  auto node_key = [&](int i, int j, int k) {
    return (static_cast<int64_t>(i) * (ny + 1) + j) * (nz + 1) + k;
  };

  std::vector<int64_t> used_keys;
  size_t occupied = 0;
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j)
      for (int k = 0; k < nz; ++k) {
        if (!grid.occupancy[grid.cell_index(i, j, k)]) continue;
        ++occupied;
        for (int di = 0; di <= 1; ++di)
          for (int dj = 0; dj <= 1; ++dj)
            for (int dk = 0; dk <= 1; ++dk) used_keys.push_back(node_key(i + di, j + dj, k + dk));
      }
  if (occupied == 0) throw MeshError("voxelization produced zero occupied cells");

  std::sort(used_keys.begin(), used_keys.end());
  used_keys.erase(std::unique(used_keys.begin(), used_keys.end()), used_keys.end());
  std::unordered_map<int64_t, int> node_id;
  node_id.reserve(used_keys.size());

  VolumeMesh mesh;
  mesh.nodes.reserve(used_keys.size());
  for (size_t n = 0; n < used_keys.size(); ++n) {
    int64_t key = used_keys[n];
    int k = static_cast<int>(key % (nz + 1));
    int j = static_cast<int>((key / (nz + 1)) % (ny + 1));
    int i = static_cast<int>(key / (static_cast<int64_t>(ny + 1) * (nz + 1)));
    node_id.emplace(key, static_cast<int>(n));
    mesh.nodes.push_back(grid.origin + Vec3{i * grid.voxel_size, j * grid.voxel_size,
                                            k * grid.voxel_size});
  }

  mesh.hex_elements.reserve(occupied);
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j)
      for (int k = 0; k < nz; ++k) {
        if (!grid.occupancy[grid.cell_index(i, j, k)]) continue;
        mesh.hex_elements.push_back({node_id.at(node_key(i, j, k)),
                                     node_id.at(node_key(i + 1, j, k)),
                                     node_id.at(node_key(i + 1, j + 1, k)),
                                     node_id.at(node_key(i, j + 1, k)),
                                     node_id.at(node_key(i, j, k + 1)),
                                     node_id.at(node_key(i + 1, j, k + 1)),
                                     node_id.at(node_key(i + 1, j + 1, k + 1)),
                                     node_id.at(node_key(i, j + 1, k + 1))});
      }
  return mesh;
}

inline VolumeMesh voxelize(const TriangleMesh& mesh, double voxel_size) {
  return grid_to_mesh(classify_voxels(mesh, voxel_size));
}

enum class NodePredicate { ZMinLayer, ZMaxLayer, Box };

// Selects nodes by position and registers the result as a named set on the mesh.
// Layer predicates use a half-voxel band around the global z extreme.
inline const std::vector<int>& select_nodes(VolumeMesh& mesh, const std::string& name,
                                            NodePredicate predicate, double voxel_size,
                                            const Aabb& region = {}) {
  if (mesh.nodes.empty()) throw MeshError("select_nodes on empty mesh");
  std::vector<int> picked;
  switch (predicate) {
    case NodePredicate::ZMinLayer: {
      double zmin = std::numeric_limits<double>::max();
      for (const auto& p : mesh.nodes) zmin = std::min(zmin, p.z);
      for (int i = 0; i < mesh.node_count(); ++i)
        if (mesh.nodes[i].z <= zmin + 0.5 * voxel_size) picked.push_back(i);
      break;
    }
    case NodePredicate::ZMaxLayer: {
      double zmax = std::numeric_limits<double>::lowest();
      for (const auto& p : mesh.nodes) zmax = std::max(zmax, p.z);
      for (int i = 0; i < mesh.node_count(); ++i)
        if (mesh.nodes[i].z >= zmax - 0.5 * voxel_size) picked.push_back(i);
      break;
    }
    case NodePredicate::Box: {
      for (int i = 0; i < mesh.node_count(); ++i) {
        const Vec3& p = mesh.nodes[i];
        bool in = true;
        for (int d = 0; d < 3; ++d) in = in && p[d] >= region.lo[d] && p[d] <= region.hi[d];
        if (in) picked.push_back(i);
      }
      break;
    }
  }
  if (picked.empty()) throw MeshError("node selection '" + name + "' is empty");
  return mesh.node_sets[name] = std::move(picked);
}

}  // namespace scan2sim
