#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "spc/scene.hpp"

namespace spc {

struct PlannerConfig {
  double coverage_area_m2 = 20.0;   // one station per this much floor area
  double sensor_height_m = 1.5;     // station height above floor_z
  double grid_resolution_m = 0.05;  // discretization of the footprint
  double movement_tol_m = 0.001;    // convergence threshold on seed movement
  int max_iterations = 50;
};

/// Even-odd rule; points on the boundary count as inside.
bool point_in_polygon(const Vec2& p, std::span<const Vec2> polygon);

/// Regular grid over the footprint interior: phase bbox-min + resolution/2,
/// spacing = resolution. Throws "domain too coarse" when fewer than
/// `min_count` samples survive the polygon test.
std::vector<Vec2> sample_domain(const RoomFootprint& footprint, double resolution,
                                std::size_t min_count = 1);

/// Nearest-seed index per sample; ties go to the lowest seed index.
std::vector<std::uint32_t> assign_nearest(std::span<const Vec2> seeds,
                                          std::span<const Vec2> samples);

struct LloydStepResult {
  std::vector<Vec2> seeds;
  double max_movement = 0.0;
};

/// One Lloyd relaxation step: each seed moves to the centroid of the samples
/// assigned to it; a seed with an empty cell stays in place.
LloydStepResult lloyd_step(std::span<const Vec2> seeds, std::span<const Vec2> samples);

/// Mean squared distance from the samples to their nearest seed.
double cvt_energy(std::span<const Vec2> seeds, std::span<const Vec2> samples);

struct LloydResult {
  std::vector<Vec2> seeds;
  int iterations = 0;
  double final_max_movement = 0.0;
  bool converged = false;
};

/// Runs lloyd_step until max movement < tol or max_iterations is reached.
LloydResult lloyd_relax(std::vector<Vec2> seeds, std::span<const Vec2> samples, double tol,
                        int max_iterations);

struct StationPlan {
  std::string room_name;
  std::vector<Vec3> stations;  // z = floor_z + sensor_height
  int iterations_used = 0;
  double final_max_movement = 0.0;
  bool converged = false;
};

/// Stations for one room: n = max(1, ceil(area / coverage_area)) seeds drawn
/// uniformly inside the footprint from rng_seed, relaxed by Lloyd iteration
/// over the discretized footprint. Deterministic in (footprint, config, seed).
StationPlan plan_stations(const RoomFootprint& footprint, const PlannerConfig& config,
                          std::uint64_t rng_seed);

void write_station_plans(const std::filesystem::path& path, std::span<const StationPlan> plans);
std::vector<StationPlan> read_station_plans(const std::filesystem::path& path);

}  // namespace spc
