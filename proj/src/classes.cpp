#include "spc/classes.hpp"

#include <algorithm>
#include <cctype>

namespace spc {

const char* class_name(SemanticClass c) {
  switch (c) {
    case SemanticClass::ceiling: return "ceiling";
    case SemanticClass::floor: return "floor";
    case SemanticClass::wall: return "wall";
    case SemanticClass::beam: return "beam";
    case SemanticClass::column: return "column";
    case SemanticClass::window: return "window";
    case SemanticClass::door: return "door";
    case SemanticClass::clutter: return "clutter";
  }
  return "clutter";
}

std::optional<SemanticClass> class_from_code(int code) {
  if (code < 0 || code >= kNumClasses) return std::nullopt;
  return static_cast<SemanticClass>(code);
}

SemanticClass consolidate_label(std::string_view raw_name) {
  std::string name;
  name.reserve(raw_name.size());
  for (char c : raw_name) {
    if (!std::isspace(static_cast<unsigned char>(c)))
      name.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  for (int code = 0; code < kNumClasses; ++code) {
    auto c = static_cast<SemanticClass>(code);
    if (name == class_name(c)) return c;
  }
  return SemanticClass::clutter;
}

}  // namespace spc
