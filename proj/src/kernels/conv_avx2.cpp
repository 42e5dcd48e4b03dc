// Compiled with -mavx2 -mfma; only called after a runtime CPU check.
#include <immintrin.h>

#include <algorithm>
#include <cstring>
#include <vector>

#include "terraindiff/kernels.hpp"

namespace terraindiff::kernels::avx2 {

namespace {

// Zero-padded copy with a one-pixel border; rows are (w + 2) wide, plus slack for 8-wide loads.
std::vector<float> pad_input(const float* in, int cin, int h, int w) {
  const int pw = w + 2;
  const int ph = h + 2;
  std::vector<float> pad(static_cast<std::size_t>(cin) * ph * pw + 16, 0.0f);
  for (int ci = 0; ci < cin; ++ci)
    for (int y = 0; y < h; ++y)
      std::memcpy(pad.data() + (static_cast<std::size_t>(ci) * ph + y + 1) * pw + 1,
                  in + (static_cast<std::size_t>(ci) * h + y) * w, sizeof(float) * w);
  return pad;
}

inline float hsum(__m256 v) {
  const __m128 lo = _mm256_castps256_ps128(v);
  const __m128 hi = _mm256_extractf128_ps(v, 1);
  __m128 s = _mm_add_ps(lo, hi);
  s = _mm_add_ps(s, _mm_movehl_ps(s, s));
  s = _mm_add_ss(s, _mm_shuffle_ps(s, s, 0x55));
  return _mm_cvtss_f32(s);
}

// NB output channels x NV vectors of 8 pixels per register block.
template <int NB, int NV>
inline void conv_block(const float* pad, int cin, int ph, int pw, const float* weight, const float* bias, int co0,
                       int y, int x, float* out, int h, int w) {
  __m256 acc[NB][NV];
  for (int j = 0; j < NB; ++j) {
    const __m256 b = _mm256_set1_ps(bias ? bias[co0 + j] : 0.0f);
    for (int v = 0; v < NV; ++v) acc[j][v] = b;
  }
  for (int ci = 0; ci < cin; ++ci) {
    const float* base = pad + (static_cast<std::size_t>(ci) * ph + y) * pw + x;
    const float* k = weight + (static_cast<std::size_t>(co0) * cin + ci) * 9;
    const std::size_t kstride = static_cast<std::size_t>(cin) * 9;
    for (int ky = 0; ky < 3; ++ky) {
      const float* row = base + static_cast<std::size_t>(ky) * pw;
      for (int kx = 0; kx < 3; ++kx) {
        __m256 src[NV];
        for (int v = 0; v < NV; ++v) src[v] = _mm256_loadu_ps(row + kx + 8 * v);
        for (int j = 0; j < NB; ++j) {
          const __m256 wv = _mm256_broadcast_ss(k + j * kstride + ky * 3 + kx);
          for (int v = 0; v < NV; ++v) acc[j][v] = _mm256_fmadd_ps(wv, src[v], acc[j][v]);
        }
      }
    }
  }
  for (int j = 0; j < NB; ++j)
    for (int v = 0; v < NV; ++v)
      _mm256_storeu_ps(out + (static_cast<std::size_t>(co0 + j) * h + y) * w + x + 8 * v, acc[j][v]);
}

template <int NB>
void conv_rows(const float* pad, int cin, int ph, int pw, const float* weight, const float* bias, int co0,
               float* out, int h, int w) {
  for (int y = 0; y < h; ++y) {
    int x = 0;
    for (; x + 16 <= w; x += 16) conv_block<NB, 2>(pad, cin, ph, pw, weight, bias, co0, y, x, out, h, w);
    for (; x + 8 <= w; x += 8) conv_block<NB, 1>(pad, cin, ph, pw, weight, bias, co0, y, x, out, h, w);
    for (; x < w; ++x) {
      for (int j = 0; j < NB; ++j) {
        const int co = co0 + j;
        float acc = bias ? bias[co] : 0.0f;
        for (int ci = 0; ci < cin; ++ci) {
          const float* k = weight + (static_cast<std::size_t>(co) * cin + ci) * 9;
          const float* base = pad + (static_cast<std::size_t>(ci) * ph + y) * pw + x;
          for (int ky = 0; ky < 3; ++ky)
            for (int kx = 0; kx < 3; ++kx) acc += k[ky * 3 + kx] * base[static_cast<std::size_t>(ky) * pw + kx];
        }
        out[(static_cast<std::size_t>(co) * h + y) * w + x] = acc;
      }
    }
  }
}

}  // namespace

void conv3x3(const float* in, int cin, int h, int w, const float* weight, const float* bias, int cout, float* out) {
  const std::vector<float> pad = pad_input(in, cin, h, w);
  const int pw = w + 2;
  const int ph = h + 2;
  int co = 0;
  for (; co + 4 <= cout; co += 4) conv_rows<4>(pad.data(), cin, ph, pw, weight, bias, co, out, h, w);
  for (; co + 2 <= cout; co += 2) conv_rows<2>(pad.data(), cin, ph, pw, weight, bias, co, out, h, w);
  for (; co < cout; ++co) conv_rows<1>(pad.data(), cin, ph, pw, weight, bias, co, out, h, w);
}

void conv3x3_grad_weight(const float* in, int cin, int h, int w, const float* dout, int cout, float* dweight,
                         float* dbias) {
  const std::vector<float> pad = pad_input(in, cin, h, w);
  const int pw = w + 2;
  const int ph = h + 2;
  const std::size_t plane = static_cast<std::size_t>(h) * w;
  const int wv = w - w % 8;
  for (int co = 0; co < cout; ++co) {
    const float* g = dout + co * plane;
    if (dbias) {
      __m256 acc = _mm256_setzero_ps();
      std::size_t i = 0;
      for (; i + 8 <= plane; i += 8) acc = _mm256_add_ps(acc, _mm256_loadu_ps(g + i));
      float s = hsum(acc);
      for (; i < plane; ++i) s += g[i];
      dbias[co] += s;
    }
    for (int ci = 0; ci < cin; ++ci) {
      const float* p = pad.data() + static_cast<std::size_t>(ci) * ph * pw;
      __m256 acc[9];
      for (auto& a : acc) a = _mm256_setzero_ps();
      float tail[9] = {};
      for (int y = 0; y < h; ++y) {
        const float* grow = g + static_cast<std::size_t>(y) * w;
        const float* r0 = p + static_cast<std::size_t>(y) * pw;
        const float* r1 = r0 + pw;
        const float* r2 = r1 + pw;
        for (int x = 0; x < wv; x += 8) {
          const __m256 d = _mm256_loadu_ps(grow + x);
          acc[0] = _mm256_fmadd_ps(d, _mm256_loadu_ps(r0 + x), acc[0]);
          acc[1] = _mm256_fmadd_ps(d, _mm256_loadu_ps(r0 + x + 1), acc[1]);
          acc[2] = _mm256_fmadd_ps(d, _mm256_loadu_ps(r0 + x + 2), acc[2]);
          acc[3] = _mm256_fmadd_ps(d, _mm256_loadu_ps(r1 + x), acc[3]);
          acc[4] = _mm256_fmadd_ps(d, _mm256_loadu_ps(r1 + x + 1), acc[4]);
          acc[5] = _mm256_fmadd_ps(d, _mm256_loadu_ps(r1 + x + 2), acc[5]);
          acc[6] = _mm256_fmadd_ps(d, _mm256_loadu_ps(r2 + x), acc[6]);
          acc[7] = _mm256_fmadd_ps(d, _mm256_loadu_ps(r2 + x + 1), acc[7]);
          acc[8] = _mm256_fmadd_ps(d, _mm256_loadu_ps(r2 + x + 2), acc[8]);
        }
        for (int x = wv; x < w; ++x) {
          const float d = grow[x];
          for (int k = 0; k < 9; ++k) tail[k] += d * p[static_cast<std::size_t>(y + k / 3) * pw + x + k % 3];
        }
      }
      float* kw = dweight + (static_cast<std::size_t>(co) * cin + ci) * 9;
      for (int k = 0; k < 9; ++k) kw[k] += hsum(acc[k]) + tail[k];
    }
  }
}

}  // namespace terraindiff::kernels::avx2
