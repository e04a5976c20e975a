#include "spc/bvh.hpp"

#include <algorithm>
#include <stdexcept>

namespace spc {

namespace {

constexpr std::uint32_t kLeafSize = 4;

Vec3 centroid(const Vec3& a, const Vec3& b, const Vec3& c) { return (a + b + c) / 3.0; }

// Slab test against a padded box. fmin/fmax absorb the NaNs that appear when
// an origin component lies exactly on a slab of a flat box, so the test stays
// conservative: it may visit an extra node but never culls a true hit.
bool hits_box(const Aabb& box, const Vec3& origin, const Vec3& inv_dir, double t_max) {
  double t0 = 0.0, t1 = t_max;
  for (int axis = 0; axis < 3; ++axis) {
    double lo = (box.min[axis] - origin[axis]) * inv_dir[axis];
    double hi = (box.max[axis] - origin[axis]) * inv_dir[axis];
    t0 = std::fmax(t0, std::fmin(lo, hi));
    t1 = std::fmin(t1, std::fmax(lo, hi));
  }
  return t0 <= t1;
}

}  // namespace

TriangleIndex TriangleIndex::build(const Scene& scene) {
  TriangleIndex index;
  std::uint32_t flat = 0;
  for (std::size_t ci = 0; ci < scene.components.size(); ++ci) {
    const TriangleMesh& mesh = scene.components[ci].mesh;
    for (std::size_t ti = 0; ti < mesh.triangles.size(); ++ti) {
      const auto& tri = mesh.triangles[ti];
      index.prims_.push_back({mesh.vertices[tri[0]], mesh.vertices[tri[1]], mesh.vertices[tri[2]],
                              static_cast<std::uint32_t>(ci), static_cast<std::uint32_t>(ti),
                              flat++});
    }
  }
  if (index.prims_.empty()) throw std::runtime_error("empty scene: no triangles to index");

  index.nodes_.reserve(2 * index.prims_.size());
  index.build_node(0, static_cast<std::uint32_t>(index.prims_.size()));
  return index;
}

std::uint32_t TriangleIndex::build_node(std::uint32_t start, std::uint32_t count) {
  Node node;
  Aabb centroid_bounds;
  for (std::uint32_t i = start; i < start + count; ++i) {
    const Primitive& p = prims_[i];
    node.bounds.expand(p.a);
    node.bounds.expand(p.b);
    node.bounds.expand(p.c);
    centroid_bounds.expand(centroid(p.a, p.b, p.c));
  }

  auto node_index = static_cast<std::uint32_t>(nodes_.size());
  nodes_.push_back(node);

  Vec3 extent = centroid_bounds.extent();
  int axis = extent.x > extent.y ? (extent.x > extent.z ? 0 : 2) : (extent.y > extent.z ? 1 : 2);
  if (count <= kLeafSize || extent[axis] <= 0.0) {
    nodes_[node_index].start = start;
    nodes_[node_index].count = count;
    return node_index;
  }

  auto mid = prims_.begin() + start + count / 2;
  std::nth_element(prims_.begin() + start, mid, prims_.begin() + start + count,
                   [axis](const Primitive& lhs, const Primitive& rhs) {
                     return centroid(lhs.a, lhs.b, lhs.c)[axis] < centroid(rhs.a, rhs.b, rhs.c)[axis];
                   });

  std::uint32_t half = count / 2;
  std::uint32_t left = build_node(start, half);
  std::uint32_t right = build_node(start + half, count - half);
  nodes_[node_index].left = left;
  nodes_[node_index].right = right;
  return node_index;
}

std::optional<Hit> TriangleIndex::closest_hit(const Vec3& origin, const Vec3& dir, double t_min,
                                              double t_max) const {
  const ShearRay ray = make_shear_ray(origin, dir);
  const Vec3 inv_dir{1.0 / dir.x, 1.0 / dir.y, 1.0 / dir.z};

  double best_t = t_max;
  std::uint32_t best_flat = 0;
  const Primitive* best = nullptr;

  std::uint32_t stack[64];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    if (!hits_box(node.bounds, origin, inv_dir, best_t)) continue;
    if (node.is_leaf()) {
      for (std::uint32_t i = node.start; i < node.start + node.count; ++i) {
        const Primitive& prim = prims_[i];
        auto t = intersect_watertight(ray, prim.a, prim.b, prim.c);
        if (!t || *t <= t_min || *t > t_max) continue;
        // Tie on t resolves to the primitive that an exhaustive scan in
        // scene order would report first.
        if (*t < best_t || (*t == best_t && (!best || prim.flat < best_flat))) {
          best_t = *t;
          best_flat = prim.flat;
          best = &prim;
        }
      }
    } else {
      stack[top++] = node.left;
      stack[top++] = node.right;
    }
  }

  if (!best) return std::nullopt;
  Hit hit;
  hit.t = best_t;
  hit.point = origin + best_t * dir;
  hit.component = best->component;
  hit.triangle = best->triangle;
  return hit;
}

}  // namespace spc
