#pragma once

#include <algorithm>
#include <limits>
#include <numeric>
#include <vector>

#include "scan2sim/core.hpp"
#include "scan2sim/mesh.hpp"

namespace scan2sim {

// Balanced k-d tree over a point cloud; exact nearest-neighbor queries.
class KdTree {
 public:
  KdTree() = default;

  explicit KdTree(const PointCloud& cloud) : points_(&cloud.points) {
    int n = cloud.size();
    order_.resize(n);
    std::iota(order_.begin(), order_.end(), 0);
    splits_.resize(n);
    if (n > 0) build(0, n);
  }

  struct Neighbor {
    int index = -1;
    double sq_distance = std::numeric_limits<double>::max();
  };

  Neighbor nearest(const Vec3& q) const {
    Neighbor best;
    if (!order_.empty()) search(0, static_cast<int>(order_.size()), q, best);
    return best;
  }

 private:
  // Implicit balanced layout: segment [begin,end) has its median element at the
  // midpoint; splits_[mid] records the axis used. No separate node storage.
  void build(int begin, int end) {
    if (end - begin <= 1) return;
    Aabb box;
    for (int i = begin; i < end; ++i) box.expand((*points_)[order_[i]]);
    Vec3 ext = box.extent();
    int axis = ext.x >= ext.y ? (ext.x >= ext.z ? 0 : 2) : (ext.y >= ext.z ? 1 : 2);
    int mid = (begin + end) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](int a, int b) {
                       double ca = (*points_)[a][axis], cb = (*points_)[b][axis];
                       return ca < cb || (ca == cb && a < b);
                     });
    splits_[mid] = static_cast<int8_t>(axis);
    build(begin, mid);
    build(mid + 1, end);
  }

  void search(int begin, int end, const Vec3& q, Neighbor& best) const {
    if (end <= begin) return;
    int mid = (begin + end) / 2;
    int idx = order_[mid];
    double d = norm2((*points_)[idx] - q);
    if (d < best.sq_distance || (d == best.sq_distance && idx < best.index)) {
      best.sq_distance = d;
      best.index = idx;
    }
    if (end - begin == 1) return;
    int axis = splits_[mid];
    double delta = q[axis] - (*points_)[idx][axis];
    if (delta <= 0.0) {
      search(begin, mid, q, best);
      if (delta * delta < best.sq_distance) search(mid + 1, end, q, best);
    } else {
      search(mid + 1, end, q, best);
      if (delta * delta < best.sq_distance) search(begin, mid, q, best);
    }
  }

  const std::vector<Vec3>* points_ = nullptr;
  std::vector<int> order_;
  std::vector<int8_t> splits_;
};

}  // namespace scan2sim
