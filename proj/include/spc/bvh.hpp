#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "spc/intersect.hpp"
#include "spc/scene.hpp"

namespace spc {

struct Hit {
  double t = 0.0;
  Vec3 point;
  std::uint32_t component = 0;  // index into Scene::components
  std::uint32_t triangle = 0;   // triangle index within that component
};

/// Bounding-volume hierarchy over every triangle of a scene. Queries return
/// exactly what an exhaustive scan over all triangles would: the nearest hit,
/// with equal-t ties broken by (component, triangle) order.
class TriangleIndex {
 public:
  /// Throws "empty scene" when the scene holds no triangles.
  static TriangleIndex build(const Scene& scene);

  std::optional<Hit> closest_hit(const Vec3& origin, const Vec3& dir, double t_min,
                                 double t_max) const;

  std::size_t primitive_count() const { return prims_.size(); }

 private:
  struct Primitive {
    Vec3 a, b, c;
    std::uint32_t component;
    std::uint32_t triangle;
    std::uint32_t flat;  // position in the scene's component/triangle order
  };
  struct Node {
    Aabb bounds;
    std::uint32_t left = 0;   // child node index (internal nodes)
    std::uint32_t right = 0;
    std::uint32_t start = 0;  // primitive range (leaves)
    std::uint32_t count = 0;
    bool is_leaf() const { return count > 0; }
  };

  std::uint32_t build_node(std::uint32_t start, std::uint32_t count);

  std::vector<Primitive> prims_;
  std::vector<Node> nodes_;
};

inline TriangleIndex build_triangle_index(const Scene& scene) { return TriangleIndex::build(scene); }

}  // namespace spc
