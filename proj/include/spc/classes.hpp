#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace spc {

/// Semantic taxonomy used throughout: eight classes with stable codes.
/// Everything that is not one of the seven structural classes folds into
/// clutter, which is always the last code.
enum class SemanticClass : int {
  ceiling = 0,
  floor = 1,
  wall = 2,
  beam = 3,
  column = 4,
  window = 5,
  door = 6,
  clutter = 7,
};

inline constexpr int kNumClasses = 8;
inline constexpr int kClutterCode = 7;

/// Label value for points that have not been annotated yet.
inline constexpr int kUnlabeled = -1;

const char* class_name(SemanticClass c);

/// Code -> class; rejects values outside [0, 7].
std::optional<SemanticClass> class_from_code(int code);

/// Folds a raw class name (the wider indoor vocabulary: chair, table,
/// bookshelf, board, sofa, ... or one of the eight names) into the eight-class
/// taxonomy. Total: unknown names map to clutter. Matching is
/// case-insensitive and ignores surrounding whitespace.
SemanticClass consolidate_label(std::string_view raw_name);

}  // namespace spc
