#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "spc/bvh.hpp"
#include "spc/planner.hpp"
#include "spc/point_cloud.hpp"
#include "spc/scene.hpp"

namespace spc {

/// Virtual time-of-flight scanner head. A station sweeps scan_num_w azimuth
/// frames by scan_num_h elevation frames; each frame is a pinhole image of
/// tof_xres x tof_yres range pixels covering lens_angle_w x lens_angle_h
/// degrees. Angles in degrees, distances in meters.
struct ScannerConfig {
  double scan_step_w = 25.0;   // azimuth between frame centers
  double scan_step_h = 25.0;   // elevation between frame centers
  int scan_num_w = 15;         // azimuth frames per sweep
  int scan_num_h = 6;          // elevation frames per sweep
  int tof_xres = 20;           // pixels per frame row
  int tof_yres = 20;           // pixels per frame column
  double lens_angle_w = 30.0;  // horizontal field of view
  double lens_angle_h = 30.0;  // vertical field of view
  double max_dist = 6.5;       // hits beyond this range are dropped
  double focal_length = 2.0;   // recorded with the scan; no geometric effect
  double range_noise_sigma = 0.0;  // stddev of radial Gaussian noise
};

/// Minimum ray parameter: hits closer than this are treated as self-hits.
inline constexpr double kRayEpsilon = 1e-6;

struct Ray {
  Vec3 origin;
  Vec3 direction;  // unit length
  int station_index = 0;
  int frame_index = 0;  // elevation frame k * scan_num_w + azimuth frame j
  int pixel_u = 0;
  int pixel_v = 0;
};

/// All rays of one station sweep in canonical order: elevation frame, then
/// azimuth frame, then pixel row, then pixel column. Azimuth frame centers
/// sit at j * scan_step_w; elevation centers at (k - (scan_num_h-1)/2) *
/// scan_step_h, symmetric about the horizon. Pixel offsets are
/// ((u + 0.5) / res - 0.5) * lens_angle.
std::vector<Ray> generate_rays(const Vec3& station, const ScannerConfig& config,
                               int station_index = 0);

/// Nearest-hit query for one ray: t in (kRayEpsilon, max_dist].
std::optional<Hit> cast_ray(const Ray& ray, const TriangleIndex& index,
                            const ScannerConfig& config);

struct ScanOutput {
  PointCloud cloud;
  /// Emitting component per point (index into Scene::components); parallel
  /// to cloud.points. Written to a sidecar file in debug mode.
  std::vector<std::int32_t> component_index;
};

/// One station: casts the full ray sweep, keeps nearest hits, optionally
/// perturbs ranges with Gaussian noise (clamped to max_dist), and returns
/// points in ray order. Points carry no labels and zero color; the true
/// component per point is reported alongside. The noise stream is derived
/// from (rng_seed, station_index).
ScanOutput scan_station(const Scene& scene, const TriangleIndex& index, const Vec3& station,
                        const ScannerConfig& config, std::uint64_t rng_seed,
                        int station_index = 0);

/// Every station of every plan, concatenated in (plan, station) order with
/// globally numbered stations starting at first_station_index.
ScanOutput scan_scene(const Scene& scene, const TriangleIndex& index,
                      std::span<const StationPlan> plans, const ScannerConfig& config,
                      std::uint64_t rng_seed, int first_station_index = 0);

/// Sidecar with the true component id per point, one line each.
void write_debug_components(const std::filesystem::path& path, const Scene& scene,
                            std::span<const std::int32_t> component_index);

}  // namespace spc
