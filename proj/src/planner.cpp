#include "spc/planner.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <stdexcept>

#include "json.hpp"
#include "spc/rng.hpp"

namespace spc {

namespace {

// Metric tolerance for the on-edge test: within a nanometer of an edge
// counts as on it.
constexpr double kEdgeTol = 1e-9;

bool on_segment(const Vec2& p, const Vec2& a, const Vec2& b) {
  Vec2 ab = b - a;
  Vec2 ap = p - a;
  double len = norm(ab);
  if (len == 0.0) return distance(p, a) <= kEdgeTol;
  if (std::fabs(cross(ab, ap)) > kEdgeTol * len) return false;
  double s = dot(ap, ab);
  return s >= -kEdgeTol * len && s <= len * len + kEdgeTol * len;
}

}  // namespace

bool point_in_polygon(const Vec2& p, std::span<const Vec2> polygon) {
  const std::size_t n = polygon.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (on_segment(p, polygon[i], polygon[(i + 1) % n])) return true;
  }
  bool inside = false;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = polygon[i];
    const Vec2& b = polygon[(i + 1) % n];
    if ((a.y > p.y) != (b.y > p.y)) {
      double x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

std::vector<Vec2> sample_domain(const RoomFootprint& footprint, double resolution,
                                std::size_t min_count) {
  if (!(resolution > 0.0))
    throw std::runtime_error("room " + footprint.name + ": grid resolution must be > 0");
  if (footprint.polygon.size() < 3)
    throw std::runtime_error("room " + footprint.name + ": degenerate footprint");

  double min_x = std::numeric_limits<double>::infinity(), min_y = min_x;
  double max_x = -min_x, max_y = -min_y;
  for (const Vec2& v : footprint.polygon) {
    min_x = std::fmin(min_x, v.x);
    min_y = std::fmin(min_y, v.y);
    max_x = std::fmax(max_x, v.x);
    max_y = std::fmax(max_y, v.y);
  }

  std::vector<Vec2> samples;
  for (int iy = 0;; ++iy) {
    double y = min_y + resolution * (iy + 0.5);
    if (y > max_y) break;
    for (int ix = 0;; ++ix) {
      double x = min_x + resolution * (ix + 0.5);
      if (x > max_x) break;
      if (point_in_polygon({x, y}, footprint.polygon)) samples.push_back({x, y});
    }
  }
  if (samples.size() < min_count)
    throw std::runtime_error("room " + footprint.name + ": domain too coarse (" +
                             std::to_string(samples.size()) + " samples for " +
                             std::to_string(min_count) + " seeds)");
  return samples;
}

std::vector<std::uint32_t> assign_nearest(std::span<const Vec2> seeds,
                                          std::span<const Vec2> samples) {
  std::vector<std::uint32_t> assignment(samples.size(), 0);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(samples.size()); ++i) {
    double best = std::numeric_limits<double>::infinity();
    std::uint32_t arg = 0;
    for (std::size_t j = 0; j < seeds.size(); ++j) {
      double d2 = squared_distance(samples[i], seeds[j]);
      if (d2 < best) {  // strict: ties keep the lowest seed index
        best = d2;
        arg = static_cast<std::uint32_t>(j);
      }
    }
    assignment[i] = arg;
  }
  return assignment;
}

LloydStepResult lloyd_step(std::span<const Vec2> seeds, std::span<const Vec2> samples) {
  auto assignment = assign_nearest(seeds, samples);

  // Accumulate centroids serially in sample order so results do not depend
  // on the parallel schedule above.
  std::vector<Vec2> sums(seeds.size());
  std::vector<std::size_t> counts(seeds.size(), 0);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    std::uint32_t j = assignment[i];
    sums[j] = sums[j] + samples[i];
    ++counts[j];
  }

  LloydStepResult result;
  result.seeds.resize(seeds.size());
  for (std::size_t j = 0; j < seeds.size(); ++j) {
    result.seeds[j] = counts[j] == 0 ? seeds[j] : sums[j] / static_cast<double>(counts[j]);
    result.max_movement = std::fmax(result.max_movement, distance(result.seeds[j], seeds[j]));
  }
  return result;
}

double cvt_energy(std::span<const Vec2> seeds, std::span<const Vec2> samples) {
  if (seeds.empty()) throw std::runtime_error("cvt_energy: no seeds");
  if (samples.empty()) throw std::runtime_error("cvt_energy: no samples");
  double total = 0.0;
  for (const Vec2& s : samples) {
    double best = std::numeric_limits<double>::infinity();
    for (const Vec2& seed : seeds) best = std::fmin(best, squared_distance(s, seed));
    total += best;
  }
  return total / static_cast<double>(samples.size());
}

LloydResult lloyd_relax(std::vector<Vec2> seeds, std::span<const Vec2> samples, double tol,
                        int max_iterations) {
  LloydResult result;
  result.seeds = std::move(seeds);
  result.final_max_movement = std::numeric_limits<double>::infinity();
  for (int it = 0; it < max_iterations; ++it) {
    auto step = lloyd_step(result.seeds, samples);
    result.seeds = std::move(step.seeds);
    result.final_max_movement = step.max_movement;
    result.iterations = it + 1;
    if (step.max_movement < tol) {
      result.converged = true;
      break;
    }
  }
  return result;
}

StationPlan plan_stations(const RoomFootprint& footprint, const PlannerConfig& config,
                          std::uint64_t rng_seed) {
  double area = polygon_area(footprint);
  if (!(area > 0.0))
    throw std::runtime_error("room " + footprint.name + ": footprint area must be > 0");

  auto n_stations = static_cast<std::size_t>(
      std::max(1.0, std::ceil(area / config.coverage_area_m2)));
  auto samples = sample_domain(footprint, config.grid_resolution_m, n_stations);

  // Initial seeds: rejection-sampled uniformly inside the footprint. The
  // stream is keyed by room name only, so two geometrically similar rooms
  // consume identical uniform sequences.
  auto stream = rng::make_stream(rng_seed, {rng::fnv1a("plan"), rng::fnv1a(footprint.name)});
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double min_x = std::numeric_limits<double>::infinity(), min_y = min_x;
  double max_x = -min_x, max_y = -min_y;
  for (const Vec2& v : footprint.polygon) {
    min_x = std::fmin(min_x, v.x);
    min_y = std::fmin(min_y, v.y);
    max_x = std::fmax(max_x, v.x);
    max_y = std::fmax(max_y, v.y);
  }
  std::vector<Vec2> seeds;
  seeds.reserve(n_stations);
  while (seeds.size() < n_stations) {
    Vec2 candidate{min_x + unit(stream) * (max_x - min_x), min_y + unit(stream) * (max_y - min_y)};
    if (point_in_polygon(candidate, footprint.polygon)) seeds.push_back(candidate);
  }

  auto relaxed = lloyd_relax(std::move(seeds), samples, config.movement_tol_m,
                             config.max_iterations);

  StationPlan plan;
  plan.room_name = footprint.name;
  plan.iterations_used = relaxed.iterations;
  plan.final_max_movement = relaxed.final_max_movement;
  plan.converged = relaxed.converged;
  for (Vec2 seed : relaxed.seeds) {
    if (!point_in_polygon(seed, footprint.polygon)) {
      // A centroid can exit a non-convex footprint; snap it to the nearest
      // interior grid sample so every station is usable.
      double best = std::numeric_limits<double>::infinity();
      Vec2 snapped = seed;
      for (const Vec2& s : samples) {
        double d2 = squared_distance(seed, s);
        if (d2 < best) {
          best = d2;
          snapped = s;
        }
      }
      seed = snapped;
    }
    plan.stations.push_back({seed.x, seed.y, footprint.floor_z + config.sensor_height_m});
  }
  return plan;
}

void write_station_plans(const std::filesystem::path& path, std::span<const StationPlan> plans) {
  nlohmann::json doc;
  doc["rooms"] = nlohmann::json::array();
  for (const StationPlan& plan : plans) {
    nlohmann::json stations = nlohmann::json::array();
    for (const Vec3& s : plan.stations) stations.push_back({s.x, s.y, s.z});
    doc["rooms"].push_back({{"room", plan.room_name},
                            {"iterations_used", plan.iterations_used},
                            {"final_max_movement", plan.final_max_movement},
                            {"converged", plan.converged},
                            {"stations", stations}});
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << doc.dump(2) << "\n";
}

std::vector<StationPlan> read_station_plans(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open station plan: " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
    std::vector<StationPlan> plans;
    for (const auto& jr : doc.at("rooms")) {
      StationPlan plan;
      plan.room_name = jr.at("room").get<std::string>();
      plan.iterations_used = jr.at("iterations_used").get<int>();
      plan.final_max_movement = jr.at("final_max_movement").get<double>();
      plan.converged = jr.at("converged").get<bool>();
      for (const auto& js : jr.at("stations"))
        plan.stations.push_back({js.at(0).get<double>(), js.at(1).get<double>(), js.at(2).get<double>()});
      plans.push_back(std::move(plan));
    }
    return plans;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("malformed station plan " + path.string() + ": " + e.what());
  }
}

}  // namespace spc
