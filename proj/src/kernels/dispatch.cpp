#include <atomic>
#include <cstdlib>
#include <cstring>
#include <vector>

#include "terraindiff/kernels.hpp"

namespace terraindiff::kernels {

namespace {

Isa detect() {
#if defined(TERRAINDIFF_HAVE_AVX2)
  if (const char* env = std::getenv("TERRAINDIFF_SIMD"); env && std::strcmp(env, "scalar") == 0) return Isa::scalar;
  if (avx2_available()) return Isa::avx2;
#endif
  return Isa::scalar;
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

// [cout][cin][ky][kx] -> [cin][cout][2-ky][2-kx]: grad-input is a forward conv with this kernel.
template <class T>
std::vector<T> flip_transpose(const T* weight, int cout, int cin) {
  std::vector<T> out(static_cast<std::size_t>(cout) * cin * 9);
  for (int co = 0; co < cout; ++co)
    for (int ci = 0; ci < cin; ++ci)
      for (int k = 0; k < 9; ++k)
        out[(static_cast<std::size_t>(ci) * cout + co) * 9 + (8 - k)] = weight[(static_cast<std::size_t>(co) * cin + ci) * 9 + k];
  return out;
}

}  // namespace

bool avx2_available() {
#if defined(TERRAINDIFF_HAVE_AVX2)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa active_isa() { return current().load(std::memory_order_relaxed); }

void set_isa(Isa isa) {
  if (isa == Isa::avx2 && !avx2_available()) isa = Isa::scalar;
  current().store(isa, std::memory_order_relaxed);
}

std::string to_string(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

template <>
void conv3x3<float>(const float* in, int cin, int h, int w, const float* weight, const float* bias, int cout,
                    float* out) {
#if defined(TERRAINDIFF_HAVE_AVX2)
  if (active_isa() == Isa::avx2) return avx2::conv3x3(in, cin, h, w, weight, bias, cout, out);
#endif
  scalar::conv3x3(in, cin, h, w, weight, bias, cout, out);
}

template <>
void conv3x3<double>(const double* in, int cin, int h, int w, const double* weight, const double* bias, int cout,
                     double* out) {
  scalar::conv3x3(in, cin, h, w, weight, bias, cout, out);
}

template <>
void conv3x3_grad_weight<float>(const float* in, int cin, int h, int w, const float* dout, int cout, float* dweight,
                                float* dbias) {
#if defined(TERRAINDIFF_HAVE_AVX2)
  if (active_isa() == Isa::avx2) return avx2::conv3x3_grad_weight(in, cin, h, w, dout, cout, dweight, dbias);
#endif
  scalar::conv3x3_grad_weight(in, cin, h, w, dout, cout, dweight, dbias);
}

template <>
void conv3x3_grad_weight<double>(const double* in, int cin, int h, int w, const double* dout, int cout,
                                 double* dweight, double* dbias) {
  scalar::conv3x3_grad_weight(in, cin, h, w, dout, cout, dweight, dbias);
}

template <class T>
void conv3x3_grad_input(const T* dout, int cout, int h, int w, const T* weight, int cin, T* din) {
  const std::vector<T> flipped = flip_transpose(weight, cout, cin);
  conv3x3<T>(dout, cout, h, w, flipped.data(), nullptr, cin, din);
}

template void conv3x3_grad_input<float>(const float*, int, int, int, const float*, int, float*);
template void conv3x3_grad_input<double>(const double*, int, int, int, const double*, int, double*);

}  // namespace terraindiff::kernels
