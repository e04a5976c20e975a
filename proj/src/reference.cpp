#include "spc/reference.hpp"

#include <limits>
#include <stdexcept>

#include "spc/intersect.hpp"

namespace spc::reference {

std::optional<Hit> closest_hit_scan(const Scene& scene, const Vec3& origin, const Vec3& dir,
                                    double t_min, double t_max) {
  const ShearRay ray = make_shear_ray(origin, dir);
  std::optional<Hit> best;
  for (std::size_t ci = 0; ci < scene.components.size(); ++ci) {
    const TriangleMesh& mesh = scene.components[ci].mesh;
    for (std::size_t ti = 0; ti < mesh.triangles.size(); ++ti) {
      const auto& tri = mesh.triangles[ti];
      auto t = intersect_watertight(ray, mesh.vertices[tri[0]], mesh.vertices[tri[1]],
                                    mesh.vertices[tri[2]]);
      if (!t || *t <= t_min || *t > t_max) continue;
      if (!best || *t < best->t) {
        best = Hit{*t, origin + *t * dir, static_cast<std::uint32_t>(ci),
                   static_cast<std::uint32_t>(ti)};
      }
    }
  }
  return best;
}

std::pair<std::uint32_t, double> nearest_point_scan(std::span<const Vec3> targets,
                                                    const Vec3& query) {
  if (targets.empty()) throw std::runtime_error("empty target: nothing to scan");
  std::uint32_t arg = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < targets.size(); ++i) {
    double d2 = squared_distance(targets[i], query);
    if (d2 < best) {  // strict: ties keep the lowest index
      best = d2;
      arg = static_cast<std::uint32_t>(i);
    }
  }
  return {arg, best};
}

PointCloud transfer_labels_scan(const PointCloud& source,
                                const std::vector<ComponentCloud>& components,
                                double threshold_m) {
  std::vector<Vec3> positions;
  std::vector<int> labels;
  for (const ComponentCloud& comp : components) {
    for (const PointRecord& p : comp.cloud.points) {
      positions.push_back(p.position);
      labels.push_back(p.label);
    }
  }
  if (positions.empty()) throw std::runtime_error("empty target: component clouds hold no points");

  const double t2 = threshold_m * threshold_m;
  PointCloud out = source;
  for (PointRecord& p : out.points) {
    auto [idx, d2] = nearest_point_scan(positions, p.position);
    p.label = d2 < t2 ? labels[idx] : static_cast<int>(SemanticClass::clutter);
  }
  return out;
}

}  // namespace spc::reference
