#ifndef FLG_NUMERIC_HPP
#define FLG_NUMERIC_HPP

#include <cstdio>
#include <string>

namespace flg {

// Comparison tolerance for all strict "better off" decisions. The paper's
// constructions sit on exact ties (e.g. a deviation of cost exactly beta),
// so strictness must be resolved the same way everywhere.
inline constexpr double kCmpEps = 1e-9;

// x is strictly less than y under the global tolerance.
inline bool strictly_less(double x, double y) { return x < y - kCmpEps; }

// Multiplicative improvement test: does switching from cost `current` to
// cost `candidate` improve by a factor strictly greater than alpha?
// For alpha = 1 this reduces to the additive strict test, and the two
// notions coincide for positive costs.
inline bool improves_by_factor(double current, double candidate, double alpha) {
  return current > alpha * candidate + kCmpEps;
}

// Shortest-round-trip-ish formatting: %.17g reloads to the same double.
inline std::string fmt_full(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

// Display formatting, 6 significant digits.
inline std::string fmt_g6(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

}  // namespace flg

#endif
