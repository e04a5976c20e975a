#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "spc/classes.hpp"
#include "spc/geometry.hpp"

namespace spc {

/// One labeled building element: a triangle mesh with a semantic class and a
/// consistent display color.
struct Component {
  std::string id;
  SemanticClass class_label = SemanticClass::clutter;
  Rgb color;
  TriangleMesh mesh;
};

/// Horizontal room footprint: a simple CCW polygon at a fixed floor height.
struct RoomFootprint {
  std::string name;
  double floor_z = 0.0;
  std::vector<Vec2> polygon;
};

struct Scene {
  std::vector<Component> components;
  std::vector<RoomFootprint> rooms;
};

/// Signed shoelace area of the footprint polygon, in square meters.
/// Positive for counter-clockwise vertex order.
double polygon_area(const RoomFootprint& footprint);

struct ValidationIssue {
  std::string entity;   // component id or room name
  std::string message;
};

/// Checks scene invariants without mutating: triangles with area <= 1e-12,
/// duplicate component ids, footprints that are degenerate, clockwise, or
/// self-intersecting. Returns one issue per violation.
std::vector<ValidationIssue> validate_scene(const Scene& scene);

/// Loads a scene manifest (JSON: units, components, rooms) plus the meshes it
/// references, then validates. Structural problems and validation issues are
/// reported as errors naming the offending entity.
Scene load_scene(const std::filesystem::path& manifest_path);

/// Writes the manifest and one mesh file per component next to it.
/// load_scene(save_scene(scene)) reproduces the scene exactly.
void save_scene(const Scene& scene, const std::filesystem::path& manifest_path);

}  // namespace spc
