#pragma once

#include <algorithm>
#include <limits>
#include <numeric>
#include <vector>

#include "scan2sim/core.hpp"
#include "scan2sim/mesh.hpp"

namespace scan2sim {

// Static bounding-volume hierarchy over triangles for closest-point queries.
// Median split over the longest axis of centroid bounds; leaves hold a few triangles.
class AabbTree {
 public:
  struct Hit {
    Vec3 point;
    int triangle = -1;
    double sq_distance = 0.0;
    std::array<double, 3> barycentric{1, 0, 0};
  };

  AabbTree() = default;

  explicit AabbTree(const TriangleMesh& mesh) : mesh_(&mesh) {
    int nf = mesh.face_count();
    order_.resize(nf);
    std::iota(order_.begin(), order_.end(), 0);
    centroids_.resize(nf);
    for (int f = 0; f < nf; ++f) {
      const auto& t = mesh.faces[f];
      centroids_[f] = (mesh.vertices[t[0]] + mesh.vertices[t[1]] + mesh.vertices[t[2]]) / 3.0;
    }
    if (nf > 0) build(0, nf);
  }

  bool empty() const { return nodes_.empty(); }

  Hit closest_point(const Vec3& p) const {
    Hit best;
    best.sq_distance = std::numeric_limits<double>::max();
    if (!nodes_.empty()) search(0, p, best);
    if (best.triangle >= 0) {
      const auto& t = mesh_->faces[best.triangle];
      best.barycentric = barycentric(best.point, mesh_->vertices[t[0]], mesh_->vertices[t[1]],
                                     mesh_->vertices[t[2]]);
    }
    return best;
  }

  static std::array<double, 3> barycentric(const Vec3& q, const Vec3& a, const Vec3& b,
                                           const Vec3& c) {
    Vec3 v0 = b - a, v1 = c - a, v2 = q - a;
    double d00 = dot(v0, v0), d01 = dot(v0, v1), d11 = dot(v1, v1);
    double d20 = dot(v2, v0), d21 = dot(v2, v1);
    double denom = d00 * d11 - d01 * d01;
    if (denom <= 0.0) return {1.0, 0.0, 0.0};
    double v = (d11 * d20 - d01 * d21) / denom;
    double w = (d00 * d21 - d01 * d20) / denom;
    return {1.0 - v - w, v, w};
  }

 private:
  static constexpr int kLeafSize = 4;

  struct Node {
    Aabb box;
    int left = -1, right = -1;  // -1 on leaves
    int begin = 0, end = 0;
  };

  int build(int begin, int end) {
    int idx = static_cast<int>(nodes_.size());
    nodes_.push_back({});
    Aabb box;
    for (int i = begin; i < end; ++i) {
      const auto& t = mesh_->faces[order_[i]];
      for (int k = 0; k < 3; ++k) box.expand(mesh_->vertices[t[k]]);
    }
    nodes_[idx].box = box;
    nodes_[idx].begin = begin;
    nodes_[idx].end = end;
    if (end - begin > kLeafSize) {
      Aabb cbox;
      for (int i = begin; i < end; ++i) cbox.expand(centroids_[order_[i]]);
      Vec3 ext = cbox.extent();
      int axis = ext.x >= ext.y ? (ext.x >= ext.z ? 0 : 2) : (ext.y >= ext.z ? 1 : 2);
      int mid = (begin + end) / 2;
      std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                       [&](int a, int b) {
                         double ca = centroids_[a][axis], cb = centroids_[b][axis];
                         return ca < cb || (ca == cb && a < b);
                       });
      int l = build(begin, mid);
      int r = build(mid, end);
      nodes_[idx].left = l;
      nodes_[idx].right = r;
    }
    return idx;
  }

  void search(int node, const Vec3& p, Hit& best) const {
    const Node& n = nodes_[node];
    if (n.box.sq_distance(p) >= best.sq_distance) return;
    if (n.left < 0) {
      for (int i = n.begin; i < n.end; ++i) {
        int f = order_[i];
        const auto& t = mesh_->faces[f];
        Vec3 q = closest_point_on_triangle(p, mesh_->vertices[t[0]], mesh_->vertices[t[1]],
                                           mesh_->vertices[t[2]]);
        double d = norm2(q - p);
        if (d < best.sq_distance) {
          best.sq_distance = d;
          best.point = q;
          best.triangle = f;
        }
      }
      return;
    }
    // Visit the nearer child first.
    double dl = nodes_[n.left].box.sq_distance(p);
    double dr = nodes_[n.right].box.sq_distance(p);
    if (dl <= dr) {
      search(n.left, p, best);
      search(n.right, p, best);
    } else {
      search(n.right, p, best);
      search(n.left, p, best);
    }
  }

  const TriangleMesh* mesh_ = nullptr;
  std::vector<int> order_;
  std::vector<Vec3> centroids_;
  std::vector<Node> nodes_;
};

}  // namespace scan2sim
