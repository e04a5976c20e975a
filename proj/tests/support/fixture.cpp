#include "fixture.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <utility>

#include "spc/rng.hpp"

namespace spc::testing {

namespace fs = std::filesystem;

void add_quad(TriangleMesh& mesh, const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  const auto base = static_cast<std::uint32_t>(mesh.vertices.size());
  mesh.vertices.insert(mesh.vertices.end(), {a, b, c, d});
  mesh.triangles.push_back({base, base + 1, base + 2});
  mesh.triangles.push_back({base, base + 2, base + 3});
}

TriangleMesh box_mesh(const Vec3& lo, const Vec3& hi) {
  TriangleMesh mesh;
  // z faces
  add_quad(mesh, {lo.x, lo.y, lo.z}, {hi.x, lo.y, lo.z}, {hi.x, hi.y, lo.z}, {lo.x, hi.y, lo.z});
  add_quad(mesh, {lo.x, lo.y, hi.z}, {lo.x, hi.y, hi.z}, {hi.x, hi.y, hi.z}, {hi.x, lo.y, hi.z});
  // y faces
  add_quad(mesh, {lo.x, lo.y, lo.z}, {lo.x, lo.y, hi.z}, {hi.x, lo.y, hi.z}, {hi.x, lo.y, lo.z});
  add_quad(mesh, {lo.x, hi.y, lo.z}, {hi.x, hi.y, lo.z}, {hi.x, hi.y, hi.z}, {lo.x, hi.y, hi.z});
  // x faces
  add_quad(mesh, {lo.x, lo.y, lo.z}, {lo.x, hi.y, lo.z}, {lo.x, hi.y, hi.z}, {lo.x, lo.y, hi.z});
  add_quad(mesh, {hi.x, lo.y, lo.z}, {hi.x, lo.y, hi.z}, {hi.x, hi.y, hi.z}, {hi.x, hi.y, lo.z});
  return mesh;
}

namespace {

Component face_component(const std::string& id, SemanticClass cls, const Rgb& color,
                         const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  Component comp;
  comp.id = id;
  comp.class_label = cls;
  comp.color = color;
  add_quad(comp.mesh, a, b, c, d);
  return comp;
}

Component box_component(const std::string& id, SemanticClass cls, const Rgb& color,
                        const Vec3& lo, const Vec3& hi) {
  Component comp;
  comp.id = id;
  comp.class_label = cls;
  comp.color = color;
  comp.mesh = box_mesh(lo, hi);
  return comp;
}

/// Rectangular shell: floor, ceiling, and four walls, each its own component,
/// prefixed with the room name. Appends the footprint as well.
void add_shell(Scene& scene, const std::string& room, double x0, double x1, double y0, double y1,
               double z0, double z1, const Rgb& wall_color) {
  scene.components.push_back(face_component(room + "_floor", SemanticClass::floor, {120, 90, 60},
                                            {x0, y0, z0}, {x1, y0, z0}, {x1, y1, z0},
                                            {x0, y1, z0}));
  scene.components.push_back(face_component(room + "_ceiling", SemanticClass::ceiling,
                                            {205, 205, 215}, {x0, y0, z1}, {x0, y1, z1},
                                            {x1, y1, z1}, {x1, y0, z1}));
  scene.components.push_back(face_component(room + "_wall_ylo", SemanticClass::wall, wall_color,
                                            {x0, y0, z0}, {x0, y0, z1}, {x1, y0, z1},
                                            {x1, y0, z0}));
  scene.components.push_back(face_component(room + "_wall_yhi", SemanticClass::wall, wall_color,
                                            {x0, y1, z0}, {x1, y1, z0}, {x1, y1, z1},
                                            {x0, y1, z1}));
  scene.components.push_back(face_component(room + "_wall_xlo", SemanticClass::wall, wall_color,
                                            {x0, y0, z0}, {x0, y1, z0}, {x0, y1, z1},
                                            {x0, y0, z1}));
  scene.components.push_back(face_component(room + "_wall_xhi", SemanticClass::wall, wall_color,
                                            {x1, y0, z0}, {x1, y0, z1}, {x1, y1, z1},
                                            {x1, y1, z0}));
  RoomFootprint footprint;
  footprint.name = room;
  footprint.floor_z = z0;
  footprint.polygon = {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
  scene.rooms.push_back(footprint);
}

}  // namespace

Scene cube_room(double half, double floor_z) {
  Scene scene;
  const double z1 = floor_z + 2.0 * half;
  add_shell(scene, "cube", -half, half, -half, half, floor_z, z1, {180, 180, 170});
  return scene;
}

void add_panel_x(Scene& scene, const std::string& id, double x_plane, double lo, double hi) {
  scene.components.push_back(face_component(id, SemanticClass::clutter, {240, 60, 60},
                                            {x_plane, lo, lo}, {x_plane, hi, lo},
                                            {x_plane, hi, hi}, {x_plane, lo, hi}));
}

Scene dense_box(int n, double half) {
  Scene scene = cube_room(half, -half);
  for (Component& comp : scene.components) {
    const Vec3 origin = comp.mesh.vertices[0];
    const Vec3 du = comp.mesh.vertices[1] - origin;
    const Vec3 dv = comp.mesh.vertices[3] - origin;
    // Multiply before dividing: lattice points on face borders then come out
    // identical across adjacent faces, keeping the subdivided box seamless.
    auto lattice = [&](int i, int j) {
      return origin + (static_cast<double>(i) * du) / static_cast<double>(n) +
             (static_cast<double>(j) * dv) / static_cast<double>(n);
    };
    TriangleMesh fine;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        add_quad(fine, lattice(i, j), lattice(i + 1, j), lattice(i + 1, j + 1), lattice(i, j + 1));
      }
    }
    comp.mesh = std::move(fine);
  }
  return scene;
}

Scene three_rooms() {
  Scene scene;
  add_shell(scene, "office_a", 0.0, 5.0, 0.0, 4.0, 0.0, 3.0, {185, 178, 168});
  add_shell(scene, "office_b", 5.3, 9.8, 0.0, 3.5, 0.0, 3.0, {172, 182, 176});
  add_shell(scene, "hallway", 10.1, 16.1, 0.0, 2.5, 0.0, 3.0, {190, 186, 158});

  // Door panel standing just inside office_a's front wall. The 0.06 m offset
  // keeps its surface strictly closer to its own samples than to the wall's.
  scene.components.push_back(face_component("office_a_door", SemanticClass::door, {160, 82, 45},
                                            {2.0, 0.06, 0.0}, {2.9, 0.06, 0.0},
                                            {2.9, 0.06, 2.1}, {2.0, 0.06, 2.1}));
  scene.components.push_back(face_component("office_a_window", SemanticClass::window,
                                            {135, 206, 235}, {1.0, 3.94, 0.9}, {2.2, 3.94, 0.9},
                                            {2.2, 3.94, 2.1}, {1.0, 3.94, 2.1}));
  scene.components.push_back(box_component("office_b_column", SemanticClass::column,
                                           {150, 150, 160}, {7.3, 1.5, 0.0}, {7.7, 1.9, 2.99}));
  scene.components.push_back(box_component("hallway_beam", SemanticClass::beam, {178, 34, 34},
                                           {11.0, 1.05, 2.65}, {15.0, 1.35, 2.95}));
  return scene;
}

std::vector<Vec2> random_simple_polygon(std::uint64_t seed, int vertices, double min_radius,
                                        double max_radius, const Vec2& center) {
  std::mt19937_64 stream = rng::make_stream(seed, {rng::fnv1a("polygon")});
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Vec2> polygon;
  polygon.reserve(static_cast<std::size_t>(vertices));
  for (int i = 0; i < vertices; ++i) {
    // Jittered angle within the i-th sector keeps the ordering strictly
    // increasing, so the polygon cannot self-intersect.
    const double angle = (i + 0.25 + 0.5 * unit(stream)) * 2.0 * std::numbers::pi / vertices;
    const double radius = min_radius + (max_radius - min_radius) * unit(stream);
    polygon.push_back({center.x + radius * std::cos(angle), center.y + radius * std::sin(angle)});
  }
  return polygon;
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "spc_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_pipeline_fixture(const fs::path& dir, const Scene& scene, std::uint64_t seed) {
  fs::create_directories(dir);
  const fs::path scene_path = dir / "scene.json";
  save_scene(scene, scene_path);

  // The mixing pools hold one cloud per room, so the scene budget must not
  // exceed the room count or the mix stage would (rightly) refuse to draw.
  const std::size_t total = std::max<std::size_t>(scene.rooms.size(), 1);
  const fs::path config_path = dir / "config.json";
  std::ofstream out(config_path);
  out << "{\n"
      << "  \"scene\": \"" << scene_path.generic_string() << "\",\n"
      << "  \"output_root\": \"" << (dir / "out").generic_string() << "\",\n"
      << "  \"seed\": " << seed << ",\n"
      << "  \"mixing\": {\n"
      << "    \"total\": " << total << ",\n"
      << "    \"proportions\": [0, 50, 100],\n"
      << "    \"replicates\": 1,\n"
      << "    \"export_datasets\": true\n"
      << "  },\n"
      << "  \"blocks\": {\"points_per_block\": 512}\n"
      << "}\n";
  return config_path;
}

Scene two_cubes() {
  Scene scene;
  add_shell(scene, "room_a", -2.0, 2.0, -2.0, 2.0, -2.0, 2.0, {180, 180, 170});
  add_shell(scene, "room_b", 5.0, 9.0, -2.0, 2.0, -2.0, 2.0, {170, 180, 180});
  return scene;
}

}  // namespace spc::testing
