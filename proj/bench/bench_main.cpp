// Timing harness: parallel kernels vs their serial reference twins on a
// synthetic office floor. Each section also cross-checks that both sides
// agree exactly, so a speedup never hides a divergence.

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <vector>

#include "spc/annotator.hpp"
#include "spc/bvh.hpp"
#include "spc/nn_index.hpp"
#include "spc/reference.hpp"
#include "spc/scanner.hpp"
#include "spc/scene.hpp"

namespace {

using spc::Component;
using spc::Rgb;
using spc::Scene;
using spc::SemanticClass;
using spc::TriangleMesh;
using spc::Vec3;

void add_quad(TriangleMesh& mesh, const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  const auto base = static_cast<std::uint32_t>(mesh.vertices.size());
  mesh.vertices.insert(mesh.vertices.end(), {a, b, c, d});
  mesh.triangles.push_back({base, base + 1, base + 2});
  mesh.triangles.push_back({base, base + 2, base + 3});
}

TriangleMesh box(const Vec3& lo, const Vec3& hi) {
  TriangleMesh m;
  add_quad(m, {lo.x, lo.y, lo.z}, {hi.x, lo.y, lo.z}, {hi.x, hi.y, lo.z}, {lo.x, hi.y, lo.z});
  add_quad(m, {lo.x, lo.y, hi.z}, {hi.x, lo.y, hi.z}, {hi.x, hi.y, hi.z}, {lo.x, hi.y, hi.z});
  add_quad(m, {lo.x, lo.y, lo.z}, {hi.x, lo.y, lo.z}, {hi.x, lo.y, hi.z}, {lo.x, lo.y, hi.z});
  add_quad(m, {lo.x, hi.y, lo.z}, {hi.x, hi.y, lo.z}, {hi.x, hi.y, hi.z}, {lo.x, hi.y, hi.z});
  add_quad(m, {lo.x, lo.y, lo.z}, {lo.x, hi.y, lo.z}, {lo.x, hi.y, hi.z}, {lo.x, lo.y, hi.z});
  add_quad(m, {hi.x, lo.y, lo.z}, {hi.x, hi.y, lo.z}, {hi.x, hi.y, hi.z}, {hi.x, lo.y, hi.z});
  return m;
}

Scene bench_scene() {
  Scene scene;
  const double w = 20.0, d = 20.0, h = 3.0;
  Component floor{"floor", SemanticClass::floor, Rgb{120, 120, 120}, {}};
  add_quad(floor.mesh, {0, 0, 0}, {w, 0, 0}, {w, d, 0}, {0, d, 0});
  Component ceiling{"ceiling", SemanticClass::ceiling, Rgb{200, 200, 200}, {}};
  add_quad(ceiling.mesh, {0, 0, h}, {w, 0, h}, {w, d, h}, {0, d, h});
  Component walls{"walls", SemanticClass::wall, Rgb{180, 170, 150}, {}};
  add_quad(walls.mesh, {0, 0, 0}, {w, 0, 0}, {w, 0, h}, {0, 0, h});
  add_quad(walls.mesh, {0, d, 0}, {w, d, 0}, {w, d, h}, {0, d, h});
  add_quad(walls.mesh, {0, 0, 0}, {0, d, 0}, {0, d, h}, {0, 0, h});
  add_quad(walls.mesh, {w, 0, 0}, {w, d, 0}, {w, d, h}, {w, 0, h});
  scene.components.insert(scene.components.end(), {floor, ceiling, walls});
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) {
      const double cx = 1.5 + 3.0 * i, cy = 1.5 + 3.0 * j;
      Component column{"column_" + std::to_string(i) + "_" + std::to_string(j),
                       SemanticClass::column, Rgb{90, 90, 140},
                       box({cx - 0.15, cy - 0.15, 0.0}, {cx + 0.15, cy + 0.15, h - 0.05})};
      scene.components.push_back(column);
    }
  scene.rooms.push_back({"hall", 0.0, {{0, 0}, {w, 0}, {w, d}, {0, d}}});
  return scene;
}

double now_ms() {
  using namespace std::chrono;
  return duration<double, std::milli>(steady_clock::now().time_since_epoch()).count();
}

void report(const char* name, double serial_ms, double parallel_ms, std::size_t mismatches) {
  std::printf("%-28s %10.1f ms %10.1f ms %8.2fx %10zu\n", name, serial_ms, parallel_ms,
              serial_ms / parallel_ms, mismatches);
}

}  // namespace

int main() {
  const Scene scene = bench_scene();
  const spc::TriangleIndex index = spc::TriangleIndex::build(scene);
  spc::ScannerConfig scanner;

  std::printf("threads: %d, triangles: %zu\n\n", omp_get_max_threads(),
              index.primitive_count());
  std::printf("%-28s %13s %13s %9s %10s\n", "kernel", "serial", "parallel", "speedup",
              "mismatch");

  // Ray casting: BVH traversal vs exhaustive triangle scan.
  std::vector<spc::Ray> rays;
  for (const Vec3& station : {Vec3{4.5, 4.5, 1.5}, Vec3{10.0, 10.0, 1.5}, Vec3{16.0, 7.0, 1.5}})
    for (const spc::Ray& r :
         spc::generate_rays(station, scanner, static_cast<int>(rays.size())))
      rays.push_back(r);

  std::vector<std::optional<spc::Hit>> brute(rays.size()), fast(rays.size());
  double t0 = now_ms();
  for (std::size_t i = 0; i < rays.size(); ++i)
    brute[i] = spc::reference::closest_hit_scan(scene, rays[i].origin, rays[i].direction,
                                                spc::kRayEpsilon, scanner.max_dist);
  const double brute_ms = now_ms() - t0;
  t0 = now_ms();
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < rays.size(); ++i)
    fast[i] = index.closest_hit(rays[i].origin, rays[i].direction, spc::kRayEpsilon,
                                scanner.max_dist);
  const double fast_ms = now_ms() - t0;
  std::size_t ray_mismatch = 0;
  for (std::size_t i = 0; i < rays.size(); ++i) {
    const bool same =
        brute[i].has_value() == fast[i].has_value() &&
        (!brute[i] || (brute[i]->t == fast[i]->t && brute[i]->component == fast[i]->component &&
                       brute[i]->triangle == fast[i]->triangle));
    ray_mismatch += same ? 0 : 1;
  }
  report("ray casting (36k x 3)", brute_ms, fast_ms, ray_mismatch);

  // Nearest neighbor: kd-tree vs linear scan.
  const auto components = spc::sample_component_clouds(scene, 50.0, 7);
  std::vector<Vec3> target;
  for (const auto& c : components)
    for (const spc::PointRecord& p : c.cloud.points) target.push_back(p.position);
  std::vector<Vec3> queries;
  for (std::size_t i = 0; i < rays.size(); i += 4)
    if (fast[i]) queries.push_back(fast[i]->point);

  std::vector<std::uint32_t> nn_brute(queries.size()), nn_fast(queries.size());
  t0 = now_ms();
  for (std::size_t i = 0; i < queries.size(); ++i)
    nn_brute[i] = spc::reference::nearest_point_scan(target, queries[i]).first;
  const double nn_brute_ms = now_ms() - t0;
  const spc::NearestNeighborIndex nn = spc::NearestNeighborIndex::build(target);
  t0 = now_ms();
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < queries.size(); ++i) nn_fast[i] = nn.nearest(queries[i]).index;
  const double nn_fast_ms = now_ms() - t0;
  std::size_t nn_mismatch = 0;
  for (std::size_t i = 0; i < queries.size(); ++i)
    nn_mismatch += nn_brute[i] == nn_fast[i] ? 0 : 1;
  report("nearest neighbor", nn_brute_ms, nn_fast_ms, nn_mismatch);

  // Full station sweep: one thread vs all cores, identical output required.
  const Vec3 station{10.0, 10.0, 1.5};
  const int max_threads = omp_get_max_threads();
  omp_set_num_threads(1);
  t0 = now_ms();
  const spc::ScanOutput serial_scan = spc::scan_station(scene, index, station, scanner, 99, 0);
  const double scan_serial_ms = now_ms() - t0;
  omp_set_num_threads(max_threads);
  t0 = now_ms();
  const spc::ScanOutput parallel_scan = spc::scan_station(scene, index, station, scanner, 99, 0);
  const double scan_parallel_ms = now_ms() - t0;
  const bool scan_same = serial_scan.cloud.points == parallel_scan.cloud.points &&
                         serial_scan.component_index == parallel_scan.component_index;
  report("station sweep (1 vs all)", scan_serial_ms, scan_parallel_ms, scan_same ? 0 : 1);

  const bool clean = ray_mismatch == 0 && nn_mismatch == 0 && scan_same;
  std::printf("\n%s\n", clean ? "all kernels agree with their references"
                              : "KERNEL DIVERGENCE DETECTED");
  return clean ? 0 : 1;
}
