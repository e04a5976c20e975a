#pragma once

#include <cmath>
#include <optional>

#include "spc/geometry.hpp"

namespace spc {

/// Shear-and-scale precomputation for the watertight ray-triangle test.
/// Rays prepared this way never let a hit slip through an edge shared by two
/// triangles: intersections on shared edges are reported by both.
struct ShearRay {
  Vec3 origin;
  Vec3 dir;
  int kx = 0, ky = 1, kz = 2;
  double sx = 0.0, sy = 0.0, sz = 0.0;
};

inline ShearRay make_shear_ray(const Vec3& origin, const Vec3& dir) {
  ShearRay r;
  r.origin = origin;
  r.dir = dir;
  double ax = std::fabs(dir.x), ay = std::fabs(dir.y), az = std::fabs(dir.z);
  r.kz = ax > ay ? (ax > az ? 0 : 2) : (ay > az ? 1 : 2);
  r.kx = (r.kz + 1) % 3;
  r.ky = (r.kx + 1) % 3;
  if (dir[r.kz] < 0.0) std::swap(r.kx, r.ky);
  r.sz = 1.0 / dir[r.kz];
  r.sx = dir[r.kx] * r.sz;
  r.sy = dir[r.ky] * r.sz;
  return r;
}

/// Signed ray parameter of the intersection with triangle (a, b, c), or
/// nullopt when the ray misses. Both triangle orientations hit. Callers
/// clamp t to their valid interval.
inline std::optional<double> intersect_watertight(const ShearRay& r, const Vec3& a, const Vec3& b,
                                                  const Vec3& c) {
  const Vec3 A = a - r.origin;
  const Vec3 B = b - r.origin;
  const Vec3 C = c - r.origin;

  const double Ax = A[r.kx] - r.sx * A[r.kz];
  const double Ay = A[r.ky] - r.sy * A[r.kz];
  const double Bx = B[r.kx] - r.sx * B[r.kz];
  const double By = B[r.ky] - r.sy * B[r.kz];
  const double Cx = C[r.kx] - r.sx * C[r.kz];
  const double Cy = C[r.ky] - r.sy * C[r.kz];

  const double U = Cx * By - Cy * Bx;
  const double V = Ax * Cy - Ay * Cx;
  const double W = Bx * Ay - By * Ax;

  if ((U < 0.0 || V < 0.0 || W < 0.0) && (U > 0.0 || V > 0.0 || W > 0.0)) return std::nullopt;

  const double det = U + V + W;
  if (det == 0.0) return std::nullopt;

  const double Az = r.sz * A[r.kz];
  const double Bz = r.sz * B[r.kz];
  const double Cz = r.sz * C[r.kz];
  return (U * Az + V * Bz + W * Cz) / det;
}

}  // namespace spc
