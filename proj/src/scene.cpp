#include "spc/scene.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <stdexcept>

#include "json.hpp"
#include "spc/obj_io.hpp"

namespace spc {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

std::string sanitize_filename(const std::string& id) {
  std::string out;
  for (char c : id) out.push_back(std::isalnum(static_cast<unsigned char>(c)) ? c : '_');
  return out.empty() ? std::string("component") : out;
}

// Proper or improper intersection of closed segments ab and cd.
bool segments_intersect(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  auto orient = [](const Vec2& p, const Vec2& q, const Vec2& r) {
    double v = cross(q - p, r - p);
    if (v > 0) return 1;
    if (v < 0) return -1;
    return 0;
  };
  auto on_segment = [](const Vec2& p, const Vec2& q, const Vec2& r) {
    return std::min(p.x, q.x) <= r.x && r.x <= std::max(p.x, q.x) &&
           std::min(p.y, q.y) <= r.y && r.y <= std::max(p.y, q.y);
  };
  int o1 = orient(a, b, c), o2 = orient(a, b, d), o3 = orient(c, d, a), o4 = orient(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

bool footprint_self_intersects(const std::vector<Vec2>& poly) {
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      // skip the edge itself and the two edges sharing a vertex with it
      if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
      if (segments_intersect(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n])) return true;
    }
  }
  return false;
}

}  // namespace

double polygon_area(const RoomFootprint& footprint) {
  const auto& p = footprint.polygon;
  const std::size_t n = p.size();
  double twice = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = p[i];
    const Vec2& b = p[(i + 1) % n];
    twice += a.x * b.y - b.x * a.y;
  }
  return 0.5 * twice;
}

std::vector<ValidationIssue> validate_scene(const Scene& scene) {
  std::vector<ValidationIssue> issues;

  std::set<std::string> seen_ids;
  for (const Component& comp : scene.components) {
    if (!seen_ids.insert(comp.id).second)
      issues.push_back({comp.id, "duplicate component id"});
    for (std::size_t t = 0; t < comp.mesh.triangles.size(); ++t) {
      const auto& tri = comp.mesh.triangles[t];
      double area = triangle_area(comp.mesh.vertices[tri[0]], comp.mesh.vertices[tri[1]],
                                  comp.mesh.vertices[tri[2]]);
      if (area <= 1e-12)
        issues.push_back({comp.id, "degenerate triangle " + std::to_string(t) +
                                       " (area <= 1e-12 m^2)"});
    }
  }

  std::set<std::string> seen_rooms;
  for (const RoomFootprint& room : scene.rooms) {
    if (!seen_rooms.insert(room.name).second)
      issues.push_back({room.name, "duplicate room name"});
    if (room.polygon.size() < 3) {
      issues.push_back({room.name, "degenerate footprint (fewer than 3 vertices)"});
      continue;
    }
    double area = polygon_area(room);
    if (area <= 0.0)
      issues.push_back({room.name, "footprint is not counter-clockwise (signed area <= 0)"});
    if (footprint_self_intersects(room.polygon))
      issues.push_back({room.name, "footprint self-intersects"});
  }
  return issues;
}

Scene load_scene(const std::filesystem::path& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) fail("cannot open scene manifest: " + manifest_path.string());

  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    fail("malformed scene manifest " + manifest_path.string() + ": " + e.what());
  }

  Scene scene;
  try {
    if (doc.at("units").get<std::string>() != "m")
      fail("scene manifest " + manifest_path.string() + ": units must be \"m\"");

    const auto base = manifest_path.parent_path();
    for (const json& jc : doc.at("components")) {
      Component comp;
      comp.id = jc.at("id").get<std::string>();
      comp.class_label = consolidate_label(jc.at("class").get<std::string>());
      const json& col = jc.at("color");
      if (!col.is_array() || col.size() != 3) fail("component " + comp.id + ": color must be [r, g, b]");
      for (int i = 0; i < 3; ++i) {
        long v = col[i].get<long>();
        if (v < 0 || v > 255) fail("component " + comp.id + ": color channel out of range");
      }
      comp.color = {col[0].get<std::uint8_t>(), col[1].get<std::uint8_t>(), col[2].get<std::uint8_t>()};
      comp.mesh = read_obj(base / jc.at("mesh").get<std::string>());
      scene.components.push_back(std::move(comp));
    }
    for (const json& jr : doc.at("rooms")) {
      RoomFootprint room;
      room.name = jr.at("name").get<std::string>();
      room.floor_z = jr.at("floor_z").get<double>();
      for (const json& jv : jr.at("polygon")) {
        if (!jv.is_array() || jv.size() != 2) fail("room " + room.name + ": polygon vertices must be [x, y]");
        room.polygon.push_back({jv[0].get<double>(), jv[1].get<double>()});
      }
      if (room.polygon.size() < 3) fail("room " + room.name + ": degenerate footprint");
      scene.rooms.push_back(std::move(room));
    }
  } catch (const json::exception& e) {
    fail("malformed scene manifest " + manifest_path.string() + ": " + e.what());
  }

  auto issues = validate_scene(scene);
  if (!issues.empty()) {
    std::string msg = "scene validation failed:";
    for (const auto& issue : issues) msg += "\n  " + issue.entity + ": " + issue.message;
    fail(msg);
  }
  return scene;
}

void save_scene(const Scene& scene, const std::filesystem::path& manifest_path) {
  const auto base = manifest_path.parent_path();
  std::filesystem::create_directories(base.empty() ? "." : base);

  json doc;
  doc["units"] = "m";
  doc["components"] = json::array();
  for (const Component& comp : scene.components) {
    std::string mesh_name = sanitize_filename(comp.id) + ".obj";
    write_obj(base / mesh_name, comp.mesh);
    doc["components"].push_back({{"id", comp.id},
                                 {"class", class_name(comp.class_label)},
                                 {"color", {comp.color.r, comp.color.g, comp.color.b}},
                                 {"mesh", mesh_name}});
  }
  doc["rooms"] = json::array();
  for (const RoomFootprint& room : scene.rooms) {
    json poly = json::array();
    for (const Vec2& v : room.polygon) poly.push_back({v.x, v.y});
    doc["rooms"].push_back({{"name", room.name}, {"floor_z", room.floor_z}, {"polygon", poly}});
  }

  std::ofstream out(manifest_path);
  if (!out) fail("cannot open for writing: " + manifest_path.string());
  out << doc.dump(2) << "\n";
}

}  // namespace spc
