#include "terraindiff/resample.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "terraindiff/errors.hpp"

namespace terraindiff {

namespace {

constexpr float kNaN = std::numeric_limits<float>::quiet_NaN();

void check_size(int width, int height) {
  if (width <= 0 || height <= 0) throw InputError("resize target must be positive");
}

// Index mapping shared by every quarter-turn/flip: dst (r, c) reads src index.
template <class Fn>
std::vector<std::size_t> permutation(int out_w, int out_h, Fn&& src_index) {
  std::vector<std::size_t> idx(static_cast<std::size_t>(out_w) * out_h);
  for (int r = 0; r < out_h; ++r)
    for (int c = 0; c < out_w; ++c) idx[static_cast<std::size_t>(r) * out_w + c] = src_index(r, c);
  return idx;
}

std::vector<std::size_t> rot90_index(int w, int h, int k, int& out_w, int& out_h) {
  k = ((k % 4) + 4) % 4;
  out_w = (k % 2) ? h : w;
  out_h = (k % 2) ? w : h;
  const auto W = static_cast<std::size_t>(w);
  switch (k) {
    case 1:  // counter-clockwise: dst(r, c) = src(c, w - 1 - r)
      return permutation(out_w, out_h, [&](int r, int c) { return static_cast<std::size_t>(c) * W + (w - 1 - r); });
    case 2:
      return permutation(out_w, out_h,
                         [&](int r, int c) { return static_cast<std::size_t>(h - 1 - r) * W + (w - 1 - c); });
    case 3:
      return permutation(out_w, out_h, [&](int r, int c) { return static_cast<std::size_t>(h - 1 - c) * W + r; });
    default:
      return permutation(out_w, out_h, [&](int r, int c) { return static_cast<std::size_t>(r) * W + c; });
  }
}

Grid permute(const Grid& g, const std::vector<std::size_t>& idx, int w, int h) {
  std::vector<float> v(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) v[i] = g[idx[i]];
  return Grid(w, h, std::move(v), g.geo());
}

Mask permute(const Mask& m, const std::vector<std::size_t>& idx, int w, int h) {
  std::vector<std::uint8_t> v(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) v[i] = m[idx[i]];
  return Mask(w, h, std::move(v));
}

// Source pixel-centre coordinates for a destination pixel under rotation about the centre.
struct Rotation {
  double cx, cy, cs, sn;
  Rotation(int w, int h, double degrees)
      : cx(0.5 * (w - 1)), cy(0.5 * (h - 1)),
        cs(std::cos(degrees * std::numbers::pi / 180.0)), sn(std::sin(degrees * std::numbers::pi / 180.0)) {}
  // Rows grow downwards, so a counter-clockwise turn on screen uses the inverse map below.
  void source(int r, int c, double& sc, double& sr) const {
    const double dx = c - cx, dy = r - cy;
    sc = cx + cs * dx - sn * dy;
    sr = cy + sn * dx + cs * dy;
  }
};

bool inside(double c, double r, int w, int h) { return c >= -0.5 && c <= w - 0.5 && r >= -0.5 && r <= h - 0.5; }

}  // namespace

double sample_bilinear(const Grid& g, double col, double row) {
  const int w = g.width(), h = g.height();
  if (w == 0 || h == 0) return kNaN;
  col = std::clamp(col, 0.0, static_cast<double>(w - 1));
  row = std::clamp(row, 0.0, static_cast<double>(h - 1));
  const int c0 = std::min(static_cast<int>(std::floor(col)), std::max(w - 2, 0));
  const int r0 = std::min(static_cast<int>(std::floor(row)), std::max(h - 2, 0));
  const int c1 = std::min(c0 + 1, w - 1), r1 = std::min(r0 + 1, h - 1);
  const double fx = col - c0, fy = row - r0;
  const int cs[2] = {c0, c1}, rs[2] = {r0, r1};
  const double wx[2] = {1.0 - fx, fx}, wy[2] = {1.0 - fy, fy};
  double acc = 0.0, wsum = 0.0;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      const double wt = wy[a] * wx[b];
      if (wt == 0.0) continue;
      const float v = g.at(rs[a], cs[b]);
      if (!std::isfinite(v)) continue;
      acc += wt * v;
      wsum += wt;
    }
  }
  if (wsum <= 0.0) return kNaN;
  return acc / wsum;
}

Grid resize_bilinear(const Grid& g, int width, int height) {
  check_size(width, height);
  if (width == g.width() && height == g.height()) return g;
  const double sx = static_cast<double>(g.width()) / width;
  const double sy = static_cast<double>(g.height()) / height;
  std::vector<float> out(static_cast<std::size_t>(width) * height);
  for (int r = 0; r < height; ++r)
    for (int c = 0; c < width; ++c)
      out[static_cast<std::size_t>(r) * width + c] =
          static_cast<float>(sample_bilinear(g, (c + 0.5) * sx - 0.5, (r + 0.5) * sy - 0.5));
  GeoRef geo = g.geo();
  geo.pixel_size *= sx;
  return Grid(width, height, std::move(out), geo);
}

Mask resize_nearest(const Mask& m, int width, int height) {
  check_size(width, height);
  const double sx = static_cast<double>(m.width()) / width;
  const double sy = static_cast<double>(m.height()) / height;
  std::vector<std::uint8_t> out(static_cast<std::size_t>(width) * height);
  for (int r = 0; r < height; ++r) {
    const int sr = std::min(static_cast<int>((r + 0.5) * sy), m.height() - 1);
    for (int c = 0; c < width; ++c) {
      const int sc = std::min(static_cast<int>((c + 0.5) * sx), m.width() - 1);
      out[static_cast<std::size_t>(r) * width + c] = m.at(sr, sc);
    }
  }
  return Mask(width, height, std::move(out));
}

Grid rotate_bilinear(const Grid& g, double degrees) {
  const int w = g.width(), h = g.height();
  const Rotation rot(w, h, degrees);
  std::vector<float> out(g.size());
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      double sc, sr;
      rot.source(r, c, sc, sr);
      out[static_cast<std::size_t>(r) * w + c] = inside(sc, sr, w, h) ? static_cast<float>(sample_bilinear(g, sc, sr)) : kNaN;
    }
  }
  return g.with_values(std::move(out));
}

Mask rotate_nearest(const Mask& m, double degrees) {
  const int w = m.width(), h = m.height();
  const Rotation rot(w, h, degrees);
  std::vector<std::uint8_t> out(m.size(), 0);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      double sc, sr;
      rot.source(r, c, sc, sr);
      if (!inside(sc, sr, w, h)) continue;
      const int ic = std::clamp(static_cast<int>(std::lround(sc)), 0, w - 1);
      const int ir = std::clamp(static_cast<int>(std::lround(sr)), 0, h - 1);
      out[static_cast<std::size_t>(r) * w + c] = m.at(ir, ic);
    }
  }
  return Mask(w, h, std::move(out));
}

Grid rot90(const Grid& g, int k) {
  int w, h;
  const auto idx = rot90_index(g.width(), g.height(), k, w, h);
  return permute(g, idx, w, h);
}

Mask rot90(const Mask& m, int k) {
  int w, h;
  const auto idx = rot90_index(m.width(), m.height(), k, w, h);
  return permute(m, idx, w, h);
}

Grid flip_horizontal(const Grid& g) {
  const int w = g.width();
  return permute(g, permutation(w, g.height(), [&](int r, int c) { return static_cast<std::size_t>(r) * w + (w - 1 - c); }),
                 w, g.height());
}

Mask flip_horizontal(const Mask& m) {
  const int w = m.width();
  return permute(m, permutation(w, m.height(), [&](int r, int c) { return static_cast<std::size_t>(r) * w + (w - 1 - c); }),
                 w, m.height());
}

Grid flip_vertical(const Grid& g) {
  const int w = g.width(), h = g.height();
  return permute(g, permutation(w, h, [&](int r, int c) { return static_cast<std::size_t>(h - 1 - r) * w + c; }), w, h);
}

Mask flip_vertical(const Mask& m) {
  const int w = m.width(), h = m.height();
  return permute(m, permutation(w, h, [&](int r, int c) { return static_cast<std::size_t>(h - 1 - r) * w + c; }), w, h);
}

Mask crop(const Mask& m, int row0, int col0, int height, int width) {
  if (row0 < 0 || col0 < 0 || height <= 0 || width <= 0 || row0 + height > m.height() || col0 + width > m.width())
    throw InputError("crop window outside raster");
  std::vector<std::uint8_t> out(static_cast<std::size_t>(width) * height);
  for (int r = 0; r < height; ++r)
    for (int c = 0; c < width; ++c) out[static_cast<std::size_t>(r) * width + c] = m.at(row0 + r, col0 + c);
  return Mask(width, height, std::move(out));
}

}  // namespace terraindiff
