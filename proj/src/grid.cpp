#include "terraindiff/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "terraindiff/detail/stencil.hpp"
#include "terraindiff/errors.hpp"

namespace terraindiff {

namespace {

constexpr float kNoData = std::numeric_limits<float>::quiet_NaN();

void check_dims(int width, int height, std::size_t n) {
  if (width < 1 || height < 1) throw InputError("raster dimensions must be positive");
  if (n != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
    throw InputError("raster value count does not match " + std::to_string(width) + "x" + std::to_string(height));
}

}  // namespace

Grid::Grid(int width, int height, std::vector<float> values, GeoRef geo)
    : width_(width), height_(height), geo_(geo), values_(std::move(values)) {
  check_dims(width, height, values_.size());
  if (!(geo_.pixel_size > 0.0)) throw InputError("pixel_size must be positive");
}

Grid Grid::filled(int width, int height, float value, GeoRef geo) {
  return Grid(width, height, std::vector<float>(static_cast<std::size_t>(width) * height, value), geo);
}

bool Grid::valid(int row, int col) const { return std::isfinite(at(row, col)); }

Mask Grid::validity() const {
  std::vector<std::uint8_t> bits(values_.size());
  for (std::size_t i = 0; i < values_.size(); ++i) bits[i] = std::isfinite(values_[i]) ? 1 : 0;
  return Mask(width_, height_, std::move(bits));
}

Grid Grid::crop(int row0, int col0, int height, int width) const {
  if (row0 < 0 || col0 < 0 || row0 + height > height_ || col0 + width > width_ || height < 1 || width < 1)
    throw InputError("crop window outside raster");
  std::vector<float> out(static_cast<std::size_t>(width) * height);
  for (int r = 0; r < height; ++r)
    std::copy_n(values_.begin() + static_cast<std::ptrdiff_t>(row0 + r) * width_ + col0, width,
                out.begin() + static_cast<std::ptrdiff_t>(r) * width);
  GeoRef g = geo_;
  g.x0 += col0 * g.pixel_size;
  g.y0 -= row0 * g.pixel_size;
  return Grid(width, height, std::move(out), g);
}

Mask::Mask(int width, int height, std::vector<std::uint8_t> bits)
    : width_(width), height_(height), bits_(std::move(bits)) {
  check_dims(width, height, bits_.size());
}

Mask Mask::filled(int width, int height, bool value) {
  return Mask(width, height, std::vector<std::uint8_t>(static_cast<std::size_t>(width) * height, value ? 1 : 0));
}

std::size_t Mask::count() const {
  return static_cast<std::size_t>(std::count_if(bits_.begin(), bits_.end(), [](std::uint8_t b) { return b != 0; }));
}

Mask Mask::operator&(const Mask& other) const {
  if (width_ != other.width_ || height_ != other.height_) throw InputError("mask shape mismatch");
  std::vector<std::uint8_t> bits(bits_.size());
  for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = (bits_[i] && other.bits_[i]) ? 1 : 0;
  return Mask(width_, height_, std::move(bits));
}

namespace {

void range_of(const Grid& x, const Mask& m, double& lo, double& hi, std::size_t& n) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    const float v = x[i];
    if (!m[i] || !std::isfinite(v)) continue;
    lo = std::min(lo, static_cast<double>(v));
    hi = std::max(hi, static_cast<double>(v));
    ++n;
  }
}

}  // namespace

Grid apply_affine(const Grid& x, const AffineMap& map, const Mask& m) {
  if (!m.matches(x)) throw InputError("mask shape mismatch");
  std::vector<float> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const float v = x[i];
    out[i] = (m[i] && std::isfinite(v)) ? static_cast<float>(map.apply(v)) : 0.0f;
  }
  return x.with_values(std::move(out));
}

Normalized normalize(const Grid& s, const std::optional<Grid>& g, const Mask& m) {
  if (!m.matches(s)) throw InputError("mask shape mismatch");
  if (g && !g->same_shape(s)) throw InputError("DSM/DTM shape mismatch");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  std::size_t n = 0;
  range_of(s, m, lo, hi, n);
  if (g) range_of(*g, m, lo, hi, n);
  if (n == 0) throw InputError("empty raster");
  if (!(hi > lo)) throw InputError("degenerate range");
  const NormParams p{lo, hi};
  const AffineMap map = AffineMap::from(p);
  Normalized out{apply_affine(s, map, m), std::nullopt, p};
  if (g) out.dtm = apply_affine(*g, map, m);
  return out;
}

NormParams inference_params(const Grid& s, const Mask& m) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  std::size_t n = 0;
  range_of(s, m, lo, hi, n);
  if (n == 0) throw InputError("empty raster");
  if (!(hi > lo)) return {lo - 0.5, hi + 0.5};
  return {lo, hi};
}

Grid denormalize(const Grid& x, const NormParams& p) {
  std::vector<float> out(x.size());
  const double half = 0.5 * (p.hi - p.lo);
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = static_cast<float>((x[i] + 1.0) * half + p.lo);
  return x.with_values(std::move(out));
}

Grid denormalize(const Grid& x, const AffineMap& map) {
  std::vector<float> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = static_cast<float>(map.invert(x[i]));
  return x.with_values(std::move(out));
}

Mask ground_mask(const Grid& s, const Grid& g, double alpha) {
  if (!s.same_shape(g)) throw InputError("DSM/DTM shape mismatch");
  if (!(alpha > 0.0)) throw InputError("alpha must be positive");
  std::vector<std::uint8_t> bits(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double r = static_cast<double>(s[i]) - static_cast<double>(g[i]);
    bits[i] = (std::isfinite(s[i]) && std::isfinite(g[i]) && std::abs(r) < alpha) ? 1 : 0;
  }
  return Mask(s.width(), s.height(), std::move(bits));
}

Mask grad_stencil_mask(const Mask& m) {
  const int w = m.width();
  const int h = m.height();
  std::vector<std::uint8_t> bits(m.size());
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      bool ok = m.at(r, c);
      int a, b;
      if (ok && detail::diff_pair(c, w, a, b)) ok = m.at(r, a) && m.at(r, b);
      if (ok && detail::diff_pair(r, h, a, b)) ok = m.at(a, c) && m.at(b, c);
      bits[static_cast<std::size_t>(r) * w + c] = ok ? 1 : 0;
    }
  }
  return Mask(w, h, std::move(bits));
}

Grid grad_magnitude(const Grid& x) {
  std::vector<float> out(x.size());
  detail::gradient_magnitude<float>(x.values(), x.width(), x.height(), x.pixel_size(), out);
  const Mask ok = grad_stencil_mask(x.validity());
  for (std::size_t i = 0; i < out.size(); ++i)
    if (!ok[i]) out[i] = kNoData;
  return x.with_values(std::move(out));
}

}  // namespace terraindiff
