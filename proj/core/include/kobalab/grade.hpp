#pragma once

#include <string_view>

namespace kobalab {

/// How much trust a computed value deserves.
///   Certified:   follows from an exact inequality chain with explicit constants.
///   Numeric:     produced by optimization and/or sampled verification.
///   NumericWeak: a fallback with no search behind it (e.g. the trivial bound).
enum class Grade { Certified, Numeric, NumericWeak };

constexpr std::string_view to_string(Grade g) {
  switch (g) {
    case Grade::Certified: return "certified";
    case Grade::Numeric: return "numeric";
    case Grade::NumericWeak: return "numeric-weak";
  }
  return "?";
}

/// The weaker of two grades.
constexpr Grade weakest(Grade a, Grade b) { return static_cast<int>(a) > static_cast<int>(b) ? a : b; }

}  // namespace kobalab
