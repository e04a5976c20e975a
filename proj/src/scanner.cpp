#include "spc/scanner.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>

#include "spc/rng.hpp"

namespace spc {

namespace {

constexpr double kDegToRad = 3.14159265358979323846 / 180.0;

void validate(const ScannerConfig& c) {
  if (c.scan_num_w < 1 || c.scan_num_h < 1)
    throw std::runtime_error("scanner config: frame counts must be >= 1");
  if (c.tof_xres < 1 || c.tof_yres < 1)
    throw std::runtime_error("scanner config: pixel resolutions must be >= 1");
  if (!(c.lens_angle_w > 0.0) || !(c.lens_angle_h > 0.0) || c.lens_angle_w >= 180.0 ||
      c.lens_angle_h >= 180.0)
    throw std::runtime_error("scanner config: lens angles must be in (0, 180)");
  if (!(c.max_dist > 0.0)) throw std::runtime_error("scanner config: max_dist must be > 0");
  if (c.range_noise_sigma < 0.0)
    throw std::runtime_error("scanner config: range_noise_sigma must be >= 0");
}

}  // namespace

std::vector<Ray> generate_rays(const Vec3& station, const ScannerConfig& config,
                               int station_index) {
  validate(config);
  std::vector<Ray> rays;
  rays.reserve(static_cast<std::size_t>(config.scan_num_w) * config.scan_num_h *
               config.tof_xres * config.tof_yres);

  const double mid_k = (config.scan_num_h - 1) / 2.0;
  for (int k = 0; k < config.scan_num_h; ++k) {
    const double elevation_center = (k - mid_k) * config.scan_step_h;
    for (int j = 0; j < config.scan_num_w; ++j) {
      const double azimuth_center = j * config.scan_step_w;
      for (int v = 0; v < config.tof_yres; ++v) {
        const double phi = ((v + 0.5) / config.tof_yres - 0.5) * config.lens_angle_h;
        for (int u = 0; u < config.tof_xres; ++u) {
          const double theta = ((u + 0.5) / config.tof_xres - 0.5) * config.lens_angle_w;
          const double az = (azimuth_center + theta) * kDegToRad;
          const double el = (elevation_center + phi) * kDegToRad;
          Ray ray;
          ray.origin = station;
          ray.direction = {std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el)};
          ray.station_index = station_index;
          ray.frame_index = k * config.scan_num_w + j;
          ray.pixel_u = u;
          ray.pixel_v = v;
          rays.push_back(ray);
        }
      }
    }
  }
  return rays;
}

std::optional<Hit> cast_ray(const Ray& ray, const TriangleIndex& index,
                            const ScannerConfig& config) {
  return index.closest_hit(ray.origin, ray.direction, kRayEpsilon, config.max_dist);
}

ScanOutput scan_station(const Scene& scene, const TriangleIndex& index, const Vec3& station,
                        const ScannerConfig& config, std::uint64_t rng_seed, int station_index) {
  (void)scene;
  auto rays = generate_rays(station, config, station_index);

  std::vector<Hit> hits(rays.size());
  std::vector<char> hit_mask(rays.size(), 0);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(rays.size()); ++i) {
    if (auto hit = cast_ray(rays[i], index, config)) {
      hits[i] = *hit;
      hit_mask[i] = 1;
    }
  }

  // Serial pass in ray order: appends points and draws noise deterministically.
  auto noise_stream = rng::make_stream(rng_seed, {rng::fnv1a("scan"),
                                                  static_cast<std::uint64_t>(station_index)});
  std::normal_distribution<double> noise(0.0, config.range_noise_sigma);

  ScanOutput out;
  out.cloud.points.reserve(rays.size());
  out.component_index.reserve(rays.size());
  for (std::size_t i = 0; i < rays.size(); ++i) {
    if (!hit_mask[i]) continue;
    const Hit& hit = hits[i];
    PointRecord rec;
    if (config.range_noise_sigma > 0.0) {
      double t = hit.t + noise(noise_stream);
      t = std::clamp(t, kRayEpsilon, config.max_dist);
      rec.position = rays[i].origin + t * rays[i].direction;
    } else {
      rec.position = hit.point;
    }
    rec.color = {0, 0, 0};
    rec.label = kUnlabeled;
    rec.station = station_index;
    out.cloud.points.push_back(rec);
    out.component_index.push_back(static_cast<std::int32_t>(hit.component));
  }
  return out;
}

ScanOutput scan_scene(const Scene& scene, const TriangleIndex& index,
                      std::span<const StationPlan> plans, const ScannerConfig& config,
                      std::uint64_t rng_seed, int first_station_index) {
  ScanOutput out;
  int station_index = first_station_index;
  for (const StationPlan& plan : plans) {
    for (const Vec3& station : plan.stations) {
      ScanOutput part = scan_station(scene, index, station, config, rng_seed, station_index);
      out.cloud.points.insert(out.cloud.points.end(), part.cloud.points.begin(),
                              part.cloud.points.end());
      out.component_index.insert(out.component_index.end(), part.component_index.begin(),
                                 part.component_index.end());
      ++station_index;
    }
  }
  return out;
}

void write_debug_components(const std::filesystem::path& path, const Scene& scene,
                            std::span<const std::int32_t> component_index) {
  std::string out;
  for (std::int32_t ci : component_index) {
    if (ci < 0 || static_cast<std::size_t>(ci) >= scene.components.size())
      throw std::runtime_error("debug sidecar: component index out of range");
    out += scene.components[ci].id;
    out.push_back('\n');
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path.string());
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace spc
