#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "spc/classes.hpp"
#include "spc/geometry.hpp"

namespace spc {

struct PointRecord {
  Vec3 position;
  Rgb color;
  int label = kUnlabeled;  // class code 0..7, or kUnlabeled
  int station = -1;        // emitting station index, -1 when not applicable

  friend bool operator==(const PointRecord&, const PointRecord&) = default;
};

struct PointCloud {
  std::vector<PointRecord> points;
  std::string frame = "world";

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

/// ASCII interchange format, one point per line: "x y z r g b label station".
/// Coordinates are written with shortest round-trip precision, so
/// write -> read reproduces the cloud exactly.
void write_point_cloud(const std::filesystem::path& path, const PointCloud& cloud);
PointCloud read_point_cloud(const std::filesystem::path& path);

/// Six-column variant ("x y z r g b") used for exported training scenes.
void write_xyzrgb(const std::filesystem::path& path, const PointCloud& cloud);
/// Reads a six-column file; every point gets the given label.
PointCloud read_xyzrgb(const std::filesystem::path& path, int label = kUnlabeled);

/// Appends a double with shortest round-trip formatting.
void append_double(std::string& out, double v);

}  // namespace spc
