#include "spc/point_cloud.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>
#include <system_error>

namespace spc {

void append_double(std::string& out, double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

namespace {

void append_int(std::string& out, long v) {
  char buf[24];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void append_xyzrgb(std::string& out, const PointRecord& p) {
  append_double(out, p.position.x);
  out.push_back(' ');
  append_double(out, p.position.y);
  out.push_back(' ');
  append_double(out, p.position.z);
  out.push_back(' ');
  append_int(out, p.color.r);
  out.push_back(' ');
  append_int(out, p.color.g);
  out.push_back(' ');
  append_int(out, p.color.b);
}

struct LineParser {
  const char* cur;
  const char* end;
  const std::filesystem::path& path;
  std::size_t line_no;

  void skip_ws() {
    while (cur != end && (*cur == ' ' || *cur == '\t' || *cur == '\r')) ++cur;
  }
  bool done() {
    skip_ws();
    return cur == end;
  }
  [[noreturn]] void fail(const char* what) {
    throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": " + what);
  }
  double next_double() {
    skip_ws();
    double v = 0.0;
    auto res = std::from_chars(cur, end, v);
    if (res.ec != std::errc()) fail("malformed number");
    cur = res.ptr;
    return v;
  }
  long next_int() {
    skip_ws();
    long v = 0;
    auto res = std::from_chars(cur, end, v);
    if (res.ec != std::errc()) fail("malformed integer");
    cur = res.ptr;
    return v;
  }
};

Rgb clamp_rgb(long r, long g, long b, LineParser& p) {
  if (r < 0 || r > 255 || g < 0 || g > 255 || b < 0 || b > 255) p.fail("color out of range");
  return {static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(g), static_cast<std::uint8_t>(b)};
}

PointCloud read_columns(const std::filesystem::path& path, bool with_label_station, int fixed_label) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open point cloud: " + path.string());
  PointCloud cloud;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    LineParser p{line.data(), line.data() + line.size(), path, line_no};
    if (p.done() || *p.cur == '#') continue;
    PointRecord rec;
    rec.position.x = p.next_double();
    rec.position.y = p.next_double();
    rec.position.z = p.next_double();
    long r = p.next_int();
    long g = p.next_int();
    long b = p.next_int();
    rec.color = clamp_rgb(r, g, b, p);
    if (with_label_station) {
      rec.label = static_cast<int>(p.next_int());
      rec.station = static_cast<int>(p.next_int());
      if (rec.label != kUnlabeled && !class_from_code(rec.label)) p.fail("label out of range");
    } else {
      rec.label = fixed_label;
    }
    if (!p.done()) p.fail("trailing characters");
    cloud.points.push_back(rec);
  }
  return cloud;
}

}  // namespace

void write_point_cloud(const std::filesystem::path& path, const PointCloud& cloud) {
  std::string out;
  out.reserve(cloud.size() * 48);
  for (const PointRecord& p : cloud.points) {
    append_xyzrgb(out, p);
    out.push_back(' ');
    append_int(out, p.label);
    out.push_back(' ');
    append_int(out, p.station);
    out.push_back('\n');
  }
  write_text(path, out);
}

PointCloud read_point_cloud(const std::filesystem::path& path) {
  return read_columns(path, true, kUnlabeled);
}

void write_xyzrgb(const std::filesystem::path& path, const PointCloud& cloud) {
  std::string out;
  out.reserve(cloud.size() * 40);
  for (const PointRecord& p : cloud.points) {
    append_xyzrgb(out, p);
    out.push_back('\n');
  }
  write_text(path, out);
}

PointCloud read_xyzrgb(const std::filesystem::path& path, int label) {
  return read_columns(path, false, label);
}

}  // namespace spc
