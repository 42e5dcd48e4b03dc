#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace terraindiff {

// Georeferencing stub: origin of the top-left pixel corner and square pixel size.
struct GeoRef {
  double x0 = 0.0;
  double y0 = 0.0;
  double pixel_size = 1.0;

  bool operator==(const GeoRef&) const = default;
};

class Mask;

// Single-band raster. Nodata is any non-finite value. Immutable once built.
class Grid {
 public:
  Grid() = default;
  Grid(int width, int height, std::vector<float> values, GeoRef geo = {});

  static Grid filled(int width, int height, float value, GeoRef geo = {});

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return values_.size(); }
  const GeoRef& geo() const { return geo_; }
  double pixel_size() const { return geo_.pixel_size; }

  float at(int row, int col) const { return values_[static_cast<std::size_t>(row) * width_ + col]; }
  float operator[](std::size_t i) const { return values_[i]; }
  bool valid(int row, int col) const;
  std::span<const float> values() const { return values_; }

  Mask validity() const;
  bool same_shape(const Grid& other) const { return width_ == other.width_ && height_ == other.height_; }

  // New grid sharing this grid's georeferencing.
  Grid with_values(std::vector<float> values) const { return Grid(width_, height_, std::move(values), geo_); }
  Grid crop(int row0, int col0, int height, int width) const;

 private:
  int width_ = 0;
  int height_ = 0;
  GeoRef geo_{};
  std::vector<float> values_;
};

class Mask {
 public:
  Mask() = default;
  Mask(int width, int height, std::vector<std::uint8_t> bits);

  static Mask filled(int width, int height, bool value);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return bits_.size(); }
  bool at(int row, int col) const { return bits_[static_cast<std::size_t>(row) * width_ + col] != 0; }
  bool operator[](std::size_t i) const { return bits_[i] != 0; }
  std::span<const std::uint8_t> bits() const { return bits_; }
  std::size_t count() const;

  bool matches(const Grid& g) const { return width_ == g.width() && height_ == g.height(); }
  Mask operator&(const Mask& other) const;
  bool operator==(const Mask&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> bits_;
};

struct NormParams {
  double lo = 0.0;
  double hi = 1.0;
};

// x_norm = (x - offset) * scale. Every normalization variant in the project reduces to this.
struct AffineMap {
  double offset = 0.0;
  double scale = 1.0;

  static AffineMap from(const NormParams& p) { return {0.5 * (p.hi + p.lo), 2.0 / (p.hi - p.lo)}; }
  double apply(double x) const { return (x - offset) * scale; }
  double invert(double x) const { return x / scale + offset; }
};

struct Normalized {
  Grid dsm;
  std::optional<Grid> dtm;
  NormParams params;
};

// Min-max map of valid pixels to [-1, 1] using the joint range of s and g.
// Invalid pixels (mask false or non-finite) become exactly 0.
Normalized normalize(const Grid& s, const std::optional<Grid>& g, const Mask& m);

// Min-max parameters for inference from the DSM alone; a degenerate range is widened to 1 m.
NormParams inference_params(const Grid& s, const Mask& m);

Grid apply_affine(const Grid& x, const AffineMap& map, const Mask& m);

Grid denormalize(const Grid& x, const NormParams& p);
Grid denormalize(const Grid& x, const AffineMap& map);

// True where |s - g| < alpha and both pixels are valid.
Mask ground_mask(const Grid& s, const Grid& g, double alpha);

// Forward-difference gradient magnitude scaled by pixel size. The last row/column copies
// the previous difference. A pixel whose stencil touches nodata is nodata.
Grid grad_magnitude(const Grid& x);

// Stencil validity used by grad_magnitude: pixel and its forward neighbours all valid.
Mask grad_stencil_mask(const Mask& m);

}  // namespace terraindiff
