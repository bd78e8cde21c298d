#pragma once

#include <cmath>

namespace hypermatch {

// Ceil/floor of real-valued threshold formulas with a tolerance window, so
// that expressions like 0.9 * 2 * 5 / 3 (= 3.0000000000000004 in binary)
// round to the intended integer.
inline long long ceil_tol(double x) { return (long long)std::ceil(x - 1e-9); }
inline long long floor_tol(double x) { return (long long)std::floor(x + 1e-9); }

} // namespace hypermatch
