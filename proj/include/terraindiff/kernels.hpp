#pragma once

#include <string>

namespace terraindiff::kernels {

// Instruction set used by the float kernels. Double-precision kernels are always scalar.
enum class Isa { scalar, avx2 };

bool avx2_available();
Isa active_isa();
// Selects the kernel family; requesting avx2 on a CPU without it falls back to scalar.
void set_isa(Isa isa);
std::string to_string(Isa isa);

// Same-padded 3x3 convolution, stride 1. Layouts are channel-major; weight is
// [cout][cin][3][3]. bias may be null.
template <class T>
void conv3x3(const T* in, int cin, int h, int w, const T* weight, const T* bias, int cout, T* out);

// Accumulates dL/dweight and (if dbias is non-null) dL/dbias.
template <class T>
void conv3x3_grad_weight(const T* in, int cin, int h, int w, const T* dout, int cout, T* dweight, T* dbias);

// Writes dL/din (overwrites).
template <class T>
void conv3x3_grad_input(const T* dout, int cout, int h, int w, const T* weight, int cin, T* din);

namespace scalar {
template <class T>
void conv3x3(const T* in, int cin, int h, int w, const T* weight, const T* bias, int cout, T* out);
template <class T>
void conv3x3_grad_weight(const T* in, int cin, int h, int w, const T* dout, int cout, T* dweight, T* dbias);
}  // namespace scalar

namespace avx2 {
void conv3x3(const float* in, int cin, int h, int w, const float* weight, const float* bias, int cout, float* out);
void conv3x3_grad_weight(const float* in, int cin, int h, int w, const float* dout, int cout, float* dweight,
                         float* dbias);
}  // namespace avx2

}  // namespace terraindiff::kernels
