#pragma once

#include <cstddef>
#include <vector>

namespace terraindiff {

// Dense channel-major activation block: data[(ch * h + row) * w + col].
template <class T>
struct Tensor {
  int c = 0;
  int h = 0;
  int w = 0;
  std::vector<T> data;

  Tensor() = default;
  Tensor(int channels, int height, int width, T fill = T(0))
      : c(channels), h(height), w(width), data(static_cast<std::size_t>(channels) * height * width, fill) {}

  std::size_t plane() const { return static_cast<std::size_t>(h) * w; }
  std::size_t size() const { return data.size(); }
  T* channel(int i) { return data.data() + i * plane(); }
  const T* channel(int i) const { return data.data() + i * plane(); }
  T& at(int ch, int row, int col) { return data[(static_cast<std::size_t>(ch) * h + row) * w + col]; }
  T at(int ch, int row, int col) const { return data[(static_cast<std::size_t>(ch) * h + row) * w + col]; }
  bool same_shape(const Tensor& o) const { return c == o.c && h == o.h && w == o.w; }
};

}  // namespace terraindiff
