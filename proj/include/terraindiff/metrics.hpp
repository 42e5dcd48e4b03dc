#pragma once

#include <cstddef>
#include <vector>

#include "terraindiff/grid.hpp"

namespace terraindiff {

struct RegressionMetrics {
  double rmse = 0.0;
  double mae = 0.0;
  std::size_t count = 0;
};

struct ClassificationMetrics {
  double e_t1 = 0.0;   // % of true non-ground predicted ground
  double e_t2 = 0.0;   // % of true ground predicted non-ground
  double e_tot = 0.0;  // % of all valid pixels misclassified
  double e_sum = 0.0;  // e_t1 + e_t2, reported alongside e_tot
  bool no_ground = false;     // class absent, e_t2 forced to 0
  bool no_nonground = false;  // class absent, e_t1 forced to 0
};

// Pools errors over several rasters. The one-shot functions below wrap these.
class RegressionAccumulator {
 public:
  void add(const Grid& pred, const Grid& truth, const Mask& m);
  RegressionMetrics result() const;

 private:
  double sum_sq_ = 0.0;
  double sum_abs_ = 0.0;
  std::size_t n_ = 0;
};

class ClassificationAccumulator {
 public:
  explicit ClassificationAccumulator(double threshold = 0.5) : threshold_(threshold) {}
  void add(const Grid& prob, const Mask& gt_ground, const Mask& m);
  ClassificationMetrics result() const;

 private:
  double threshold_;
  std::size_t ground_ = 0, nonground_ = 0, ground_missed_ = 0, nonground_kept_ = 0;
};

// Over pixels valid in m and finite in both rasters. Empty → InputError "empty mask".
RegressionMetrics regression_metrics(const Grid& pred, const Grid& truth, const Mask& m);
ClassificationMetrics classification_errors(const Grid& prob, const Mask& gt_ground, const Mask& m,
                                            double threshold = 0.5);

// Map coordinates: x = x0 + (col + 0.5) * pixel_size, y = y0 + (row + 0.5) * pixel_size.
struct GroundPoint {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

struct MedResult {
  double med = 0.0;
  std::size_t used = 0;
  std::size_t skipped = 0;  // outside the raster extent or over nodata
};

// Mean vertical distance between points and the bilinearly interpolated surface.
MedResult med(const Grid& pred, const std::vector<GroundPoint>& points);

// Mean angle in degrees between unit normals of 4-adjacent pixels. Normals come from
// central differences (one-sided at the border) divided by the pixel size.
double mad(const Grid& pred);

enum class Boundary { replicate, periodic };

// x <- x + factor * (mean of 4-neighbours - x), applied simultaneously to every valid pixel.
// Invalid pixels are left unchanged and excluded from neighbour means. Axes of length one
// contribute no neighbours.
Grid laplacian_smooth(const Grid& x, int iterations = 20, double factor = 0.5,
                      Boundary boundary = Boundary::replicate);

struct MetricsReport {
  RegressionMetrics regression;
  ClassificationMetrics classification;
  double mad = 0.0;
  bool has_classification = false;
  bool has_med = false;
  MedResult med;
};

}  // namespace terraindiff
