#include "spc/annotator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "spc/nn_index.hpp"
#include "spc/rng.hpp"

namespace spc {

namespace {

// Fraction of the cell size used for jitter. Small enough that any point of
// a fully covered interior keeps a sample within (1 + kJitter) * cell /
// sqrt(2), just under the default label threshold at the default density.
constexpr double kJitter = 0.35;
constexpr int kCellTries = 16;

struct Frame2d {
  Vec3 origin, e1, e2;
  Vec2 p0, p1, p2;

  Vec3 lift(const Vec2& q) const { return origin + q.x * e1 + q.y * e2; }
};

bool make_frame(const Vec3& a, const Vec3& b, const Vec3& c, Frame2d& frame) {
  Vec3 ab = b - a;
  Vec3 normal = cross(ab, c - a);
  double len_ab = norm(ab);
  double len_n = norm(normal);
  if (len_ab <= 0.0 || len_n <= 0.0) return false;
  frame.origin = a;
  frame.e1 = ab / len_ab;
  frame.e2 = normalized(cross(normal / len_n, frame.e1));
  frame.p0 = {0.0, 0.0};
  frame.p1 = {len_ab, 0.0};
  frame.p2 = {dot(c - a, frame.e1), dot(c - a, frame.e2)};
  return true;
}

bool inside_triangle(const Vec2& q, const Frame2d& f) {
  // CCW by construction (p2.y > 0); boundary counts as inside.
  double s0 = cross(f.p1 - f.p0, q - f.p0);
  double s1 = cross(f.p2 - f.p1, q - f.p1);
  double s2 = cross(f.p0 - f.p2, q - f.p2);
  return s0 >= 0.0 && s1 >= 0.0 && s2 >= 0.0;
}

// Uniform point in the triangle via the square-root map.
Vec2 uniform_in_triangle(std::mt19937_64& stream, const Frame2d& f) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double r1 = std::sqrt(unit(stream));
  double r2 = unit(stream);
  return (1.0 - r1) * f.p0 + r1 * (1.0 - r2) * f.p1 + (r1 * r2) * f.p2;
}

// One jittered sample per grid cell that overlaps the triangle, in row-major
// cell order. Cells whose jittered neighborhood misses the triangle fall
// back to uniform draws over the whole cell, so boundary cells contribute a
// sample from the cell-triangle overlap.
void collect_cell_samples(const Frame2d& frame, double s, std::uint64_t tri_seed,
                          std::uint64_t pass, std::vector<Vec2>& out) {
  double min_x = std::min({frame.p0.x, frame.p1.x, frame.p2.x});
  double max_x = std::max({frame.p0.x, frame.p1.x, frame.p2.x});
  double min_y = std::min({frame.p0.y, frame.p1.y, frame.p2.y});
  double max_y = std::max({frame.p0.y, frame.p1.y, frame.p2.y});
  auto nx = static_cast<std::int64_t>((max_x - min_x) / s) + 1;
  auto ny = static_cast<std::int64_t>((max_y - min_y) / s) + 1;

  for (std::int64_t jy = 0; jy < ny; ++jy) {
    for (std::int64_t jx = 0; jx < nx; ++jx) {
      Vec2 center{min_x + (jx + 0.5) * s, min_y + (jy + 0.5) * s};
      auto stream = rng::make_stream(tri_seed, {pass, static_cast<std::uint64_t>(jy * nx + jx)});
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      bool placed = false;
      Vec2 q;
      for (int attempt = 0; attempt < kCellTries && !placed; ++attempt) {
        q = center + kJitter * s * Vec2{unit(stream) - 0.5, unit(stream) - 0.5};
        placed = inside_triangle(q, frame);
      }
      for (int attempt = 0; attempt < kCellTries && !placed; ++attempt) {
        q = Vec2{min_x + (jx + unit(stream)) * s, min_y + (jy + unit(stream)) * s};
        placed = inside_triangle(q, frame);
      }
      if (placed) out.push_back(q);
    }
  }
}

/// Stratified samples over one triangle, exactly `quota` of them. The cell
/// size starts at sqrt(area / quota) and is rescaled once so the cell count
/// lands near the quota; the small residual is absorbed by an evenly spread
/// stride selection (surplus) or uniform top-up draws (shortfall).
void sample_triangle(const Vec3& a, const Vec3& b, const Vec3& c, std::size_t quota,
                     std::uint64_t tri_seed, std::vector<Vec3>& out) {
  if (quota == 0) return;
  Frame2d frame;
  if (!make_frame(a, b, c, frame)) {
    for (std::size_t i = 0; i < quota; ++i) out.push_back((a + b + c) / 3.0);
    return;
  }

  double area = 0.5 * cross(frame.p1 - frame.p0, frame.p2 - frame.p0);
  double s = std::sqrt(area / static_cast<double>(quota));

  std::vector<Vec2> candidates;
  collect_cell_samples(frame, s, tri_seed, 1, candidates);
  if (!candidates.empty() && candidates.size() != quota) {
    double rescaled = s * std::sqrt(static_cast<double>(candidates.size()) /
                                    static_cast<double>(quota));
    candidates.clear();
    collect_cell_samples(frame, rescaled, tri_seed, 2, candidates);
  }

  std::vector<Vec2> kept;
  kept.reserve(quota);
  if (candidates.size() > quota) {
    for (std::size_t i = 0; i < quota; ++i) kept.push_back(candidates[i * candidates.size() / quota]);
  } else {
    kept = std::move(candidates);
    auto top_up = rng::make_stream(tri_seed, {rng::fnv1a("top-up")});
    while (kept.size() < quota) kept.push_back(uniform_in_triangle(top_up, frame));
  }
  for (const Vec2& q : kept) out.push_back(frame.lift(q));
}

struct TargetSet {
  std::vector<Vec3> positions;
  std::vector<const PointRecord*> records;
};

TargetSet flatten(const std::vector<ComponentCloud>& components) {
  TargetSet t;
  for (const ComponentCloud& comp : components) {
    for (const PointRecord& p : comp.cloud.points) {
      t.positions.push_back(p.position);
      t.records.push_back(&p);
    }
  }
  return t;
}

}  // namespace

std::vector<ComponentCloud> sample_component_clouds(const Scene& scene, double density,
                                                    std::uint64_t rng_seed) {
  if (!(density > 0.0)) throw std::runtime_error("sample density must be > 0");

  std::vector<ComponentCloud> result(scene.components.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t ci = 0; ci < static_cast<std::int64_t>(scene.components.size()); ++ci) {
    const Component& comp = scene.components[ci];
    ComponentCloud out;
    out.component_index = static_cast<std::uint32_t>(ci);
    out.component_id = comp.id;
    out.class_label = comp.class_label;
    out.color = comp.color;

    const auto& tris = comp.mesh.triangles;
    std::vector<double> areas(tris.size());
    double total_area = 0.0;
    for (std::size_t t = 0; t < tris.size(); ++t) {
      areas[t] = triangle_area(comp.mesh.vertices[tris[t][0]], comp.mesh.vertices[tris[t][1]],
                               comp.mesh.vertices[tris[t][2]]);
      total_area += areas[t];
    }
    if (tris.empty() || total_area <= 0.0) {
      result[ci] = std::move(out);
      continue;
    }

    auto realized = static_cast<std::size_t>(
        std::max<long long>(1, std::llround(density * total_area)));

    // Largest-remainder split of the realized count across triangles.
    std::vector<std::size_t> quota(tris.size());
    std::vector<std::pair<double, std::size_t>> fractions(tris.size());
    std::size_t assigned = 0;
    for (std::size_t t = 0; t < tris.size(); ++t) {
      double share = static_cast<double>(realized) * areas[t] / total_area;
      quota[t] = static_cast<std::size_t>(share);
      assigned += quota[t];
      fractions[t] = {share - static_cast<double>(quota[t]), t};
    }
    std::sort(fractions.begin(), fractions.end(), [](const auto& lhs, const auto& rhs) {
      if (lhs.first != rhs.first) return lhs.first > rhs.first;
      return lhs.second < rhs.second;  // equal fractions: lower triangle first
    });
    for (std::size_t k = 0; assigned < realized; ++k, ++assigned) ++quota[fractions[k].second];

    std::vector<Vec3> positions;
    positions.reserve(realized);
    for (std::size_t t = 0; t < tris.size(); ++t) {
      std::uint64_t tri_seed = rng::derive(rng_seed, {rng::fnv1a("samples"),
                                                      static_cast<std::uint64_t>(ci),
                                                      static_cast<std::uint64_t>(t)});
      sample_triangle(comp.mesh.vertices[tris[t][0]], comp.mesh.vertices[tris[t][1]],
                      comp.mesh.vertices[tris[t][2]], quota[t], tri_seed, positions);
    }

    out.cloud.points.reserve(positions.size());
    for (const Vec3& p : positions) {
      PointRecord rec;
      rec.position = p;
      rec.color = comp.color;
      rec.label = static_cast<int>(comp.class_label);
      rec.station = -1;
      out.cloud.points.push_back(rec);
    }
    result[ci] = std::move(out);
  }
  return result;
}

PointCloud transfer_labels(const PointCloud& source, const std::vector<ComponentCloud>& components,
                           double threshold_m) {
  if (!(threshold_m > 0.0)) throw std::runtime_error("label threshold must be > 0");
  TargetSet targets = flatten(components);
  if (targets.positions.empty())
    throw std::runtime_error("empty target: component clouds hold no points");

  auto index = NearestNeighborIndex::build(targets.positions);
  const double t2 = threshold_m * threshold_m;

  PointCloud out = source;
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(out.points.size()); ++i) {
    auto r = index.nearest(out.points[i].position);
    out.points[i].label =
        r.d2 < t2 ? targets.records[r.index]->label : static_cast<int>(SemanticClass::clutter);
  }
  return out;
}

PointCloud transfer_colors(const PointCloud& source, const PointCloud& reference,
                           double threshold_m, const std::optional<RigidTransform>& transform) {
  if (!(threshold_m > 0.0)) throw std::runtime_error("color threshold must be > 0");
  if (reference.empty()) throw std::runtime_error("empty reference: no points to take colors from");

  std::vector<Vec3> positions;
  positions.reserve(reference.size());
  if (transform) {
    if (transform->orthonormal_error() > 1e-6)
      throw std::runtime_error("non-rigid transform: rotation block is not orthonormal");
    for (const PointRecord& p : reference.points) positions.push_back(transform->apply(p.position));
  } else {
    for (const PointRecord& p : reference.points) positions.push_back(p.position);
  }

  auto index = NearestNeighborIndex::build(positions);
  const double t2 = threshold_m * threshold_m;

  PointCloud out = source;
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(out.points.size()); ++i) {
    auto r = index.nearest(out.points[i].position);
    if (r.d2 < t2) out.points[i].color = reference.points[r.index].color;
  }
  return out;
}

}  // namespace spc
