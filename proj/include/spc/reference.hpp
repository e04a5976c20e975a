#pragma once

#include <optional>
#include <span>

#include "spc/annotator.hpp"
#include "spc/bvh.hpp"
#include "spc/scene.hpp"

/// Serial brute-force counterparts of the accelerated kernels. They share
/// only the primitive tests with the fast paths, never the search
/// structures, so tests can hold the two routes against each other. The
/// benchmark target reports their relative throughput.
namespace spc::reference {

/// Exhaustive nearest-hit scan over every triangle of the scene, in
/// (component, triangle) order; ties on t keep the earlier primitive.
std::optional<Hit> closest_hit_scan(const Scene& scene, const Vec3& origin, const Vec3& dir,
                                    double t_min, double t_max);

/// Exhaustive nearest-neighbor scan; ties keep the lowest index.
/// Returns (index, squared distance).
std::pair<std::uint32_t, double> nearest_point_scan(std::span<const Vec3> targets,
                                                    const Vec3& query);

/// Label transfer via the exhaustive scan above; single-threaded.
PointCloud transfer_labels_scan(const PointCloud& source,
                                const std::vector<ComponentCloud>& components,
                                double threshold_m);

}  // namespace spc::reference
