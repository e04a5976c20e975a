#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "spc/config.hpp"
#include "spc/scene.hpp"

namespace spc::testing {

/// Appends a planar quad (a, b, c, d in order) as two triangles.
void add_quad(TriangleMesh& mesh, const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d);

/// Axis-aligned box [lo, hi] as a closed twelve-triangle mesh.
TriangleMesh box_mesh(const Vec3& lo, const Vec3& hi);

/// Closed cubic room: side 2*half meters, floor at floor_z, one component per
/// face ("cube_floor", "cube_ceiling", "cube_wall_xlo", "cube_wall_xhi",
/// "cube_wall_ylo", "cube_wall_yhi"), plus a square footprint named "cube".
Scene cube_room(double half = 2.0, double floor_z = -2.0);

/// Adds a clutter panel on the plane x = x_plane spanning [lo, hi]^2 in y and z.
void add_panel_x(Scene& scene, const std::string& id, double x_plane, double lo, double hi);

/// Closed box with every face tessellated n x n: 12 * n^2 triangles total,
/// one component per face. n = 29 already exceeds ten thousand triangles.
Scene dense_box(int n, double half = 2.0);

/// Two disjoint closed cubic rooms ("room_a", "room_b"), side 4 m each.
Scene two_cubes();

/// Three disjoint closed rooms (office_a, office_b, hallway) with a door
/// panel, a window panel, a column, and a beam. Every component is one of the
/// seven structural classes; nothing is clutter.
Scene three_rooms();

/// Star-shaped simple polygon: `vertices` corners at sorted angles around the
/// center with radii drawn uniformly from [min_radius, max_radius].
std::vector<Vec2> random_simple_polygon(std::uint64_t seed, int vertices, double min_radius,
                                        double max_radius, const Vec2& center = {0.0, 0.0});

/// Fresh empty directory under the system temp root; wiped if it exists.
std::filesystem::path scratch_dir(const std::string& name);

/// Writes `scene` and a pipeline config that points at it, with fixture-sized
/// mixing (total 3, proportions 0/50/100, dataset export on) and small blocks.
/// Returns the config path; outputs go to dir / "out".
std::filesystem::path write_pipeline_fixture(const std::filesystem::path& dir, const Scene& scene,
                                             std::uint64_t seed = 42);

}  // namespace spc::testing
