#include <algorithm>

#include "terraindiff/kernels.hpp"

namespace terraindiff::kernels::scalar {

template <class T>
void conv3x3(const T* in, int cin, int h, int w, const T* weight, const T* bias, int cout, T* out) {
  const std::size_t plane = static_cast<std::size_t>(h) * w;
  for (int co = 0; co < cout; ++co) {
    T* o = out + co * plane;
    std::fill(o, o + plane, bias ? bias[co] : T(0));
    for (int ci = 0; ci < cin; ++ci) {
      const T* src = in + ci * plane;
      const T* k = weight + (static_cast<std::size_t>(co) * cin + ci) * 9;
      for (int ky = 0; ky < 3; ++ky) {
        const int dy = ky - 1;
        const int y0 = std::max(0, -dy);
        const int y1 = std::min(h, h - dy);
        for (int kx = 0; kx < 3; ++kx) {
          const int dx = kx - 1;
          const int x0 = std::max(0, -dx);
          const int x1 = std::min(w, w - dx);
          const T wv = k[ky * 3 + kx];
          for (int y = y0; y < y1; ++y) {
            const T* s = src + static_cast<std::size_t>(y + dy) * w + dx;
            T* d = o + static_cast<std::size_t>(y) * w;
            for (int x = x0; x < x1; ++x) d[x] += wv * s[x];
          }
        }
      }
    }
  }
}

template <class T>
void conv3x3_grad_weight(const T* in, int cin, int h, int w, const T* dout, int cout, T* dweight, T* dbias) {
  const std::size_t plane = static_cast<std::size_t>(h) * w;
  for (int co = 0; co < cout; ++co) {
    const T* g = dout + co * plane;
    if (dbias) {
      T acc = 0;
      for (std::size_t i = 0; i < plane; ++i) acc += g[i];
      dbias[co] += acc;
    }
    for (int ci = 0; ci < cin; ++ci) {
      const T* src = in + ci * plane;
      T* k = dweight + (static_cast<std::size_t>(co) * cin + ci) * 9;
      for (int ky = 0; ky < 3; ++ky) {
        const int dy = ky - 1;
        const int y0 = std::max(0, -dy);
        const int y1 = std::min(h, h - dy);
        for (int kx = 0; kx < 3; ++kx) {
          const int dx = kx - 1;
          const int x0 = std::max(0, -dx);
          const int x1 = std::min(w, w - dx);
          T acc = 0;
          for (int y = y0; y < y1; ++y) {
            const T* s = src + static_cast<std::size_t>(y + dy) * w + dx;
            const T* d = g + static_cast<std::size_t>(y) * w;
            for (int x = x0; x < x1; ++x) acc += d[x] * s[x];
          }
          k[ky * 3 + kx] += acc;
        }
      }
    }
  }
}

template void conv3x3<float>(const float*, int, int, int, const float*, const float*, int, float*);
template void conv3x3<double>(const double*, int, int, int, const double*, const double*, int, double*);
template void conv3x3_grad_weight<float>(const float*, int, int, int, const float*, int, float*, float*);
template void conv3x3_grad_weight<double>(const double*, int, int, int, const double*, int, double*, double*);

}  // namespace terraindiff::kernels::scalar
