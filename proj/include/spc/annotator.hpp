#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "spc/point_cloud.hpp"
#include "spc/scene.hpp"

namespace spc {

struct AnnotationConfig {
  double label_threshold_m = 0.05;     // nearest-sample distance gate for labels
  double color_threshold_m = 0.05;     // nearest-point distance gate for colors
  double sample_density_per_m2 = 400;  // component-cloud surface density
};

/// Dense reference cloud for one component: every point carries the
/// component's class and color.
struct ComponentCloud {
  std::uint32_t component_index = 0;
  std::string component_id;
  SemanticClass class_label = SemanticClass::clutter;
  Rgb color;
  PointCloud cloud;
};

/// Surface samples per component at the requested density. The realized
/// count per component is max(1, round(density * mesh area)), split across
/// triangles by area with largest-remainder rounding. Samples are stratified
/// over each triangle (jittered cells of roughly 1/density square meters)
/// so the gap to the nearest sample stays close to the mean spacing.
/// Deterministic in (scene, density, rng_seed).
std::vector<ComponentCloud> sample_component_clouds(const Scene& scene, double density,
                                                    std::uint64_t rng_seed);

/// Threshold nearest-neighbor label transfer: each source point takes the
/// class of its nearest component sample when that distance is strictly
/// below threshold_m, and clutter otherwise. Geometry, colors, and order are
/// unchanged; every output point is labeled.
PointCloud transfer_labels(const PointCloud& source, const std::vector<ComponentCloud>& components,
                           double threshold_m);

/// Color transfer from a registered reference cloud: each source point takes
/// the color of its nearest reference point when that distance is strictly
/// below threshold_m, keeping its prior color otherwise. The optional
/// transform registers the reference into the source frame and must be rigid
/// (rotation block orthonormal within 1e-6).
PointCloud transfer_colors(const PointCloud& source, const PointCloud& reference,
                           double threshold_m,
                           const std::optional<RigidTransform>& transform = std::nullopt);

}  // namespace spc
