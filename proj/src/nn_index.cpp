#include "spc/nn_index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace spc {

namespace {
constexpr std::uint32_t kLeafSize = 8;
}

NearestNeighborIndex NearestNeighborIndex::build(std::span<const Vec3> targets) {
  if (targets.empty()) throw std::runtime_error("empty target: nothing to index");
  NearestNeighborIndex index;
  index.points_.assign(targets.begin(), targets.end());
  index.order_.resize(targets.size());
  for (std::uint32_t i = 0; i < targets.size(); ++i) index.order_[i] = i;
  index.nodes_.reserve(2 * targets.size() / kLeafSize + 2);
  index.build_node(0, static_cast<std::uint32_t>(targets.size()));
  return index;
}

std::int32_t NearestNeighborIndex::build_node(std::uint32_t start, std::uint32_t count) {
  Node node;
  auto node_index = static_cast<std::int32_t>(nodes_.size());
  nodes_.push_back(node);

  if (count <= kLeafSize) {
    nodes_[node_index].start = start;
    nodes_[node_index].count = count;
    return node_index;
  }

  Aabb bounds;
  for (std::uint32_t i = start; i < start + count; ++i) bounds.expand(points_[order_[i]]);
  Vec3 extent = bounds.extent();
  int axis = extent.x > extent.y ? (extent.x > extent.z ? 0 : 2) : (extent.y > extent.z ? 1 : 2);
  if (extent[axis] <= 0.0) {  // all points coincide
    nodes_[node_index].start = start;
    nodes_[node_index].count = count;
    return node_index;
  }

  std::uint32_t half = count / 2;
  auto begin = order_.begin() + start;
  std::nth_element(begin, begin + half, begin + count,
                   [this, axis](std::uint32_t lhs, std::uint32_t rhs) {
                     return points_[lhs][axis] < points_[rhs][axis];
                   });

  nodes_[node_index].axis = axis;
  nodes_[node_index].split = points_[order_[start + half]][axis];
  std::int32_t left = build_node(start, half);
  std::int32_t right = build_node(start + half, count - half);
  nodes_[node_index].left = left;
  nodes_[node_index].right = right;
  return node_index;
}

void NearestNeighborIndex::search(std::int32_t node_index, const Vec3& query, Result& best) const {
  const Node& node = nodes_[node_index];
  if (node.count > 0) {
    for (std::uint32_t i = node.start; i < node.start + node.count; ++i) {
      std::uint32_t idx = order_[i];
      double d2 = squared_distance(points_[idx], query);
      if (d2 < best.d2 || (d2 == best.d2 && idx < best.index)) {
        best.d2 = d2;
        best.index = idx;
      }
    }
    return;
  }

  double delta = query[node.axis] - node.split;
  std::int32_t near = delta < 0.0 ? node.left : node.right;
  std::int32_t far = delta < 0.0 ? node.right : node.left;
  search(near, query, best);
  // Visit the far side on plane distance <= best: an equal-distance point
  // with a lower index may live there.
  if (delta * delta <= best.d2) search(far, query, best);
}

NearestNeighborIndex::Result NearestNeighborIndex::nearest(const Vec3& query) const {
  Result best;
  best.index = std::numeric_limits<std::uint32_t>::max();
  best.d2 = std::numeric_limits<double>::infinity();
  search(0, query, best);
  return best;
}

std::pair<std::uint32_t, double> nearest_neighbor(const Vec3& query,
                                                  const NearestNeighborIndex& index) {
  auto r = index.nearest(query);
  return {r.index, std::sqrt(r.d2)};
}

}  // namespace spc
