#pragma once

#include <cmath>
#include <span>

namespace terraindiff::detail {

// Forward-difference pair along an axis of length n: derivative at i is x[hi] - x[lo].
// The last sample reuses the previous pair. Returns false when n == 1 (derivative is 0).
inline bool diff_pair(int i, int n, int& lo, int& hi) {
  if (n < 2) return false;
  if (i < n - 1) {
    lo = i;
    hi = i + 1;
  } else {
    lo = n - 2;
    hi = n - 1;
  }
  return true;
}

// Per-pixel gradient magnitude of a row-major field, in units of value per spacing.
template <class T>
void gradient_magnitude(std::span<const T> x, int w, int h, double spacing, std::span<T> out) {
  const T inv = static_cast<T>(1.0 / spacing);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      int c0, c1, r0, r1;
      T dx = 0, dy = 0;
      if (diff_pair(c, w, c0, c1)) dx = (x[r * w + c1] - x[r * w + c0]) * inv;
      if (diff_pair(r, h, r0, r1)) dy = (x[r1 * w + c] - x[r0 * w + c]) * inv;
      out[r * w + c] = std::sqrt(dx * dx + dy * dy);
    }
  }
}

}  // namespace terraindiff::detail
