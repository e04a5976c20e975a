#pragma once

#include <filesystem>

#include "spc/geometry.hpp"

namespace spc {

/// Reads an ASCII mesh in the Wavefront subset this toolkit uses:
/// "v x y z" vertex lines and "f i j k" triangle lines with 1-based indices
/// ("f 1/1/1 ..." style suffixes are accepted and ignored). Any other line
/// type is skipped with a warning on stderr. Out-of-range indices and
/// non-triangular faces are errors.
TriangleMesh read_obj(const std::filesystem::path& path);

void write_obj(const std::filesystem::path& path, const TriangleMesh& mesh);

}  // namespace spc
