#include "spc/obj_io.hpp"

#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "spc/point_cloud.hpp"

namespace spc {

namespace {

[[noreturn]] void fail(const std::filesystem::path& path, std::size_t line_no, const std::string& what) {
  throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": " + what);
}

}  // namespace

TriangleMesh read_obj(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open mesh: " + path.string());

  TriangleMesh mesh;
  std::string line;
  std::size_t line_no = 0;
  bool warned = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag[0] == '#') continue;
    if (tag == "v") {
      Vec3 v;
      if (!(ls >> v.x >> v.y >> v.z)) fail(path, line_no, "malformed vertex");
      mesh.vertices.push_back(v);
    } else if (tag == "f") {
      std::array<std::uint32_t, 3> tri{};
      std::string token;
      int n = 0;
      while (ls >> token) {
        if (n >= 3) fail(path, line_no, "non-triangular face");
        // accept "i", "i/..", "i//.." forms; only the vertex index matters
        long idx = 0;
        auto res = std::from_chars(token.data(), token.data() + token.size(), idx);
        if (res.ec != std::errc() || idx < 1) fail(path, line_no, "malformed face index");
        if (static_cast<std::size_t>(idx) > mesh.vertices.size())
          fail(path, line_no, "face index out of range");
        tri[n++] = static_cast<std::uint32_t>(idx - 1);
      }
      if (n != 3) fail(path, line_no, "non-triangular face");
      mesh.triangles.push_back(tri);
    } else {
      if (!warned) {
        std::cerr << "warning: " << path.string() << ": ignoring unsupported line type '" << tag
                  << "' (first at line " << line_no << ")\n";
        warned = true;
      }
    }
  }
  return mesh;
}

void write_obj(const std::filesystem::path& path, const TriangleMesh& mesh) {
  std::string out;
  out.reserve(mesh.vertices.size() * 40 + mesh.triangles.size() * 20);
  for (const Vec3& v : mesh.vertices) {
    out += "v ";
    append_double(out, v.x);
    out.push_back(' ');
    append_double(out, v.y);
    out.push_back(' ');
    append_double(out, v.z);
    out.push_back('\n');
  }
  for (const auto& t : mesh.triangles) {
    out += "f ";
    out += std::to_string(t[0] + 1);
    out.push_back(' ');
    out += std::to_string(t[1] + 1);
    out.push_back(' ');
    out += std::to_string(t[2] + 1);
    out.push_back('\n');
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path.string());
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace spc
