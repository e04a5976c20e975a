#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "doctest.h"
#include "spc/nn_index.hpp"
#include "spc/reference.hpp"
#include "spc/rng.hpp"

using namespace spc;

TEST_CASE("an empty target set is an error") {
  const std::vector<Vec3> none;
  CHECK_THROWS_WITH_AS(NearestNeighborIndex::build(none), doctest::Contains("empty target"),
                       std::runtime_error);
}

TEST_CASE("nearest returns the closest point with its squared distance") {
  const std::vector<Vec3> targets{{0, 0, 0}, {1, 0, 0}, {0, 2, 0}, {5, 5, 5}};
  const auto index = NearestNeighborIndex::build(targets);
  CHECK(index.size() == 4);

  const auto r = index.nearest({0.9, 0.1, 0.0});
  CHECK(r.index == 1);
  CHECK(r.d2 == doctest::Approx(0.01 + 0.01));

  const auto [i, d] = nearest_neighbor({5, 5, 4}, index);
  CHECK(i == 3);
  CHECK(d == doctest::Approx(1.0));
}

TEST_CASE("exact distance ties resolve to the lowest target index") {
  // Duplicates and mirror-symmetric points produce exact ties.
  const std::vector<Vec3> targets{{1, 0, 0}, {-1, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, -1, 0}};
  const auto index = NearestNeighborIndex::build(targets);
  CHECK(index.nearest({0, 0, 0}).index == 0);   // all four directions tie at d2 = 1
  CHECK(index.nearest({1, 0, 0}).index == 0);   // duplicate of index 2
  CHECK(index.nearest({0, 0.5, 0}).index == 3);
}

TEST_CASE("kd-tree and exhaustive scan agree on random instances") {
  std::mt19937_64 stream = rng::make_stream(77, {rng::fnv1a("nn_fuzz")});
  std::uniform_real_distribution<double> coord(-3.0, 3.0);
  std::uniform_int_distribution<std::size_t> size_dist(1, 2000);

  for (int instance = 0; instance < 25; ++instance) {
    const std::size_t n = size_dist(stream);
    std::vector<Vec3> targets(n);
    for (Vec3& t : targets) t = {coord(stream), coord(stream), coord(stream)};
    // Insert exact duplicates so ties genuinely occur.
    if (n > 10) {
      targets[n / 2] = targets[0];
      targets[n - 1] = targets[n / 3];
    }
    const auto index = NearestNeighborIndex::build(targets);

    for (int q = 0; q < 200; ++q) {
      Vec3 query{coord(stream), coord(stream), coord(stream)};
      if (q % 5 == 0) query = targets[static_cast<std::size_t>(q) % n];  // on-point queries
      const auto fast = index.nearest(query);
      const auto [slow_index, slow_d2] = reference::nearest_point_scan(targets, query);
      REQUIRE(fast.index == slow_index);
      REQUIRE(fast.d2 == slow_d2);
    }
  }
}

TEST_CASE("clustered points do not defeat the far-side pruning") {
  // Two tight clusters straddling the root split; queries between them must
  // still find the true nearest on either side.
  std::vector<Vec3> targets;
  std::mt19937_64 stream = rng::make_stream(8, {rng::fnv1a("clusters")});
  std::uniform_real_distribution<double> jitter(-1e-4, 1e-4);
  for (int i = 0; i < 500; ++i) targets.push_back({-10 + jitter(stream), jitter(stream), 0});
  for (int i = 0; i < 500; ++i) targets.push_back({10 + jitter(stream), jitter(stream), 0});
  const auto index = NearestNeighborIndex::build(targets);

  for (double x = -12.0; x <= 12.0; x += 0.37) {
    const auto fast = index.nearest({x, 0.5, -0.25});
    const auto [slow_index, slow_d2] = reference::nearest_point_scan(targets, {x, 0.5, -0.25});
    REQUIRE(fast.index == slow_index);
    REQUIRE(fast.d2 == slow_d2);
  }
}
