#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "spc/geometry.hpp"

namespace spc {

/// Exact nearest-neighbor search over a fixed point set (kd-tree). Results
/// match an exhaustive scan: nearest point, with exact distance ties broken
/// by the lowest point index.
class NearestNeighborIndex {
 public:
  struct Result {
    std::uint32_t index = 0;  // index into the target set
    double d2 = 0.0;          // squared distance
  };

  /// Throws "empty target" when targets is empty.
  static NearestNeighborIndex build(std::span<const Vec3> targets);

  Result nearest(const Vec3& query) const;
  std::size_t size() const { return points_.size(); }

 private:
  struct Node {
    double split = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::uint32_t start = 0;
    std::uint32_t count = 0;  // > 0 for leaves
    int axis = 0;
  };

  std::int32_t build_node(std::uint32_t start, std::uint32_t count);
  void search(std::int32_t node_index, const Vec3& query, Result& best) const;

  std::vector<Vec3> points_;           // in original order
  std::vector<std::uint32_t> order_;   // tree-partitioned indices into points_
  std::vector<Node> nodes_;
};

/// Convenience wrapper returning (index, distance in meters).
std::pair<std::uint32_t, double> nearest_neighbor(const Vec3& query,
                                                  const NearestNeighborIndex& index);

}  // namespace spc
