#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "doctest.h"
#include "spc/planner.hpp"
#include "support/fixture.hpp"

using namespace spc;

namespace {

RoomFootprint make_footprint(const std::string& name, std::vector<Vec2> polygon,
                             double floor_z = 0.0) {
  RoomFootprint footprint;
  footprint.name = name;
  footprint.floor_z = floor_z;
  footprint.polygon = std::move(polygon);
  return footprint;
}

const std::vector<Vec2> kUnitSquare{{0, 0}, {1, 0}, {1, 1}, {0, 1}};

}  // namespace

TEST_CASE("point_in_polygon handles interior, exterior, boundary, and concavity") {
  CHECK(point_in_polygon({0.5, 0.5}, kUnitSquare));
  CHECK_FALSE(point_in_polygon({1.5, 0.5}, kUnitSquare));
  CHECK_FALSE(point_in_polygon({-0.1, 0.5}, kUnitSquare));
  // Boundary points count as inside.
  CHECK(point_in_polygon({0.0, 0.5}, kUnitSquare));
  CHECK(point_in_polygon({0.5, 0.0}, kUnitSquare));
  CHECK(point_in_polygon({1.0, 1.0}, kUnitSquare));

  // L-shape: the lower-right arm is part of the interior, the notch above the
  // arm is not.
  const std::vector<Vec2> ell{{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}};
  CHECK(point_in_polygon({0.5, 0.5}, ell));
  CHECK(point_in_polygon({0.5, 1.5}, ell));
  CHECK(point_in_polygon({1.5, 0.5}, ell));
  CHECK_FALSE(point_in_polygon({1.5, 1.5}, ell));
  CHECK_FALSE(point_in_polygon({2.5, 0.5}, ell));
}

TEST_CASE("sample_domain lays a half-phase grid over the footprint interior") {
  const auto footprint = make_footprint("unit", kUnitSquare);
  const auto samples = sample_domain(footprint, 0.5);
  REQUIRE(samples.size() == 4);
  // Grid phase: bbox min + resolution/2, spacing = resolution.
  CHECK(samples[0] == Vec2{0.25, 0.25});
  CHECK(std::count(samples.begin(), samples.end(), Vec2{0.75, 0.25}) == 1);
  CHECK(std::count(samples.begin(), samples.end(), Vec2{0.25, 0.75}) == 1);
  CHECK(std::count(samples.begin(), samples.end(), Vec2{0.75, 0.75}) == 1);

  SUBCASE("fine resolution fills the interior uniformly") {
    const auto fine = sample_domain(footprint, 0.05);
    CHECK(fine.size() == 400);
    for (const Vec2& s : fine) CHECK(point_in_polygon(s, footprint.polygon));
  }

  SUBCASE("concave footprints drop samples in the notch") {
    const auto ell = make_footprint(
        "ell", {{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}});
    const auto samples_ell = sample_domain(ell, 0.5);
    CHECK(samples_ell.size() == 12);  // 16-cell bbox minus the 4-cell notch
    for (const Vec2& s : samples_ell) CHECK(point_in_polygon(s, ell.polygon));
  }

  SUBCASE("a domain coarser than the footprint is an error") {
    const auto tiny = make_footprint(
        "tiny", {{0.4, 0.4}, {0.45, 0.4}, {0.45, 0.45}, {0.4, 0.45}});
    CHECK_THROWS_WITH_AS(sample_domain(tiny, 1.0), doctest::Contains("domain too coarse"),
                         std::runtime_error);
  }
}

TEST_CASE("assign_nearest breaks distance ties toward the lower seed index") {
  const std::vector<Vec2> seeds{{0, 0}, {1, 0}};
  const std::vector<Vec2> samples{{0.5, 0.0}, {0.2, 0.0}, {0.9, 0.3}};
  const auto owner = assign_nearest(seeds, samples);
  REQUIRE(owner.size() == 3);
  CHECK(owner[0] == 0);  // exact tie
  CHECK(owner[1] == 0);
  CHECK(owner[2] == 1);
}

TEST_CASE("lloyd_step moves seeds to cell centroids and leaves empty cells alone") {
  const std::vector<Vec2> samples{{0, 0}, {2, 0}, {0, 2}, {2, 2}};
  const std::vector<Vec2> seeds{{0.9, 0.9}, {50, 50}};
  const auto step = lloyd_step(seeds, samples);
  REQUIRE(step.seeds.size() == 2);
  // All samples are closer to the first seed; it moves to their centroid.
  CHECK(step.seeds[0].x == doctest::Approx(1.0));
  CHECK(step.seeds[0].y == doctest::Approx(1.0));
  // The second seed owns nothing and must not move.
  CHECK(step.seeds[1] == Vec2{50, 50});
  CHECK(step.max_movement == doctest::Approx(distance(seeds[0], step.seeds[0])));
}

TEST_CASE("cvt_energy of one centered seed in the unit square is about 1/6") {
  const auto footprint = make_footprint("unit", kUnitSquare);
  const auto samples = sample_domain(footprint, 0.05);
  const std::vector<Vec2> seed{{0.5, 0.5}};
  // Continuous value: E[ (x-1/2)^2 + (y-1/2)^2 ] = 1/6. The half-cell grid
  // offset shaves the variance to (1 - h^2) / 6 with h = 0.05.
  CHECK(cvt_energy(seed, samples) == doctest::Approx(1.0 / 6.0).epsilon(0.01));
  CHECK(std::abs(cvt_energy(seed, samples) - (1.0 - 0.05 * 0.05) / 6.0) < 1e-12);
}

TEST_CASE("lloyd_step never increases the quantization energy") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto polygon = spc::testing::random_simple_polygon(seed, 7 + seed % 5, 0.8, 2.5);
    const auto footprint = make_footprint("poly", polygon);
    const auto samples = sample_domain(footprint, 0.05);

    // Start from a few arbitrary interior samples.
    std::vector<Vec2> seeds;
    for (std::size_t i = 0; i < 3; ++i) seeds.push_back(samples[(i * 7919) % samples.size()]);

    double energy = cvt_energy(seeds, samples);
    for (int it = 0; it < 25; ++it) {
      seeds = lloyd_step(seeds, samples).seeds;
      const double next = cvt_energy(seeds, samples);
      CHECK(next <= energy * (1.0 + 1e-12) + 1e-15);
      energy = next;
    }
  }
}

TEST_CASE("lloyd_relax reports convergence against the movement tolerance") {
  const auto footprint = make_footprint("unit", kUnitSquare);
  const auto samples = sample_domain(footprint, 0.05);
  const std::vector<Vec2> seeds{{0.1, 0.1}, {0.9, 0.85}};
  const auto result = lloyd_relax(seeds, samples, 1e-4, 200);
  CHECK(result.converged);
  CHECK(result.final_max_movement < 1e-4);
  CHECK(result.iterations <= 200);
  CHECK(result.seeds.size() == 2);

  SUBCASE("an impossible tolerance exhausts max_iterations") {
    const auto capped = lloyd_relax(seeds, samples, 0.0, 3);
    CHECK(capped.iterations == 3);
  }
}

TEST_CASE("plan_stations sizes the fleet from floor area and coverage") {
  PlannerConfig config;  // coverage 20 m^2

  SUBCASE("small rooms still get one station") {
    const auto plan = plan_stations(make_footprint("unit", kUnitSquare), config, 7);
    CHECK(plan.stations.size() == 1);
  }

  SUBCASE("a 45 m^2 room gets ceil(45/20) = 3 stations") {
    const auto room = make_footprint("wide", {{0, 0}, {9, 0}, {9, 5}, {0, 5}});
    const auto plan = plan_stations(room, config, 7);
    CHECK(plan.stations.size() == 3);
  }

  SUBCASE("exact multiples do not round up") {
    const auto room = make_footprint("exact", {{0, 0}, {8, 0}, {8, 5}, {0, 5}});
    const auto plan = plan_stations(room, config, 7);
    CHECK(plan.stations.size() == 2);
  }
}

TEST_CASE("plan_stations puts every station inside the room at sensor height") {
  PlannerConfig config;
  config.coverage_area_m2 = 4.0;
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const auto polygon = spc::testing::random_simple_polygon(seed * 31, 9, 1.0, 3.0);
    auto footprint = make_footprint("room", polygon, 0.25 * static_cast<double>(seed));
    const auto plan = plan_stations(footprint, config, seed);
    CHECK(plan.room_name == "room");
    CHECK(!plan.stations.empty());
    for (const Vec3& s : plan.stations) {
      CHECK(point_in_polygon({s.x, s.y}, footprint.polygon));
      CHECK(s.z == doctest::Approx(footprint.floor_z + config.sensor_height_m));
    }
  }
}

TEST_CASE("plan_stations is deterministic in (footprint, config, seed)") {
  PlannerConfig config;
  config.coverage_area_m2 = 5.0;
  const auto footprint = make_footprint("det", spc::testing::random_simple_polygon(11, 8, 1.0, 3.0));
  const auto a = plan_stations(footprint, config, 99);
  const auto b = plan_stations(footprint, config, 99);
  CHECK(a.stations == b.stations);
  CHECK(a.iterations_used == b.iterations_used);
  CHECK(a.final_max_movement == b.final_max_movement);

  const auto c = plan_stations(footprint, config, 100);
  CHECK(a.stations != c.stations);  // a fresh seed explores a fresh start
}

TEST_CASE("plans co-vary with a global rescale of the room and the config") {
  const double k = 3.0;
  PlannerConfig base;
  base.coverage_area_m2 = 6.0;
  PlannerConfig scaled = base;
  scaled.coverage_area_m2 = base.coverage_area_m2 * k * k;
  scaled.grid_resolution_m = base.grid_resolution_m * k;
  scaled.movement_tol_m = base.movement_tol_m * k;

  const auto polygon = spc::testing::random_simple_polygon(5, 10, 1.0, 2.8);
  std::vector<Vec2> big;
  for (const Vec2& v : polygon) big.push_back(k * v);

  // Identical names keep the planner's random draws identical.
  const auto plan = plan_stations(make_footprint("twin", polygon), base, 21);
  const auto plan_k = plan_stations(make_footprint("twin", big), scaled, 21);

  REQUIRE(plan.stations.size() == plan_k.stations.size());
  for (std::size_t i = 0; i < plan.stations.size(); ++i) {
    CHECK(std::abs(plan_k.stations[i].x - k * plan.stations[i].x) < 1e-9 * k);
    CHECK(std::abs(plan_k.stations[i].y - k * plan.stations[i].y) < 1e-9 * k);
  }
}

TEST_CASE("station plans survive a write/read round-trip") {
  const auto dir = spc::testing::scratch_dir("planner_io");
  PlannerConfig config;
  config.coverage_area_m2 = 8.0;
  std::vector<StationPlan> plans;
  plans.push_back(plan_stations(make_footprint("alpha", kUnitSquare, 0.0), config, 3));
  plans.push_back(plan_stations(
      make_footprint("beta", spc::testing::random_simple_polygon(2, 8, 1.0, 2.5), 1.5), config, 3));

  write_station_plans(dir / "stations.json", plans);
  const auto loaded = read_station_plans(dir / "stations.json");
  REQUIRE(loaded.size() == plans.size());
  for (std::size_t i = 0; i < plans.size(); ++i) {
    CHECK(loaded[i].room_name == plans[i].room_name);
    CHECK(loaded[i].stations == plans[i].stations);
    CHECK(loaded[i].iterations_used == plans[i].iterations_used);
    CHECK(loaded[i].final_max_movement == plans[i].final_max_movement);
    CHECK(loaded[i].converged == plans[i].converged);
  }
}
