#pragma once

#include <random>

#include "terraindiff/grid.hpp"

namespace terraindiff {

struct AugmentConfig {
  int patch = 64;
  double p_rot90 = 0.5;
  double p_jitter = 0.5;
  double jitter_degrees = 5.0;
  double p_scale = 0.5;
  double p_flip_h = 0.5;
  double p_flip_v = 0.5;
  // Multi-scale resize targets as multiples of the patch size.
  std::vector<int> scale_factors{1, 2, 4};
  static AugmentConfig disabled(int patch);
};

struct AugmentedSample {
  Grid s;
  Grid g;
  Mask m;
};

// Quarter turn, small-angle jitter, multi-scale resize, random crop to the patch size, then
// flips. The same geometric transform is applied to s, g and m. Elevations are resampled
// bilinearly and masks by nearest neighbour; pixels rotated in from outside become invalid.
// Draws are made in a fixed order so a seeded rng gives a reproducible transform.
AugmentedSample augment(const Grid& s, const Grid& g, const Mask& m, const AugmentConfig& cfg, std::mt19937_64& rng);

}  // namespace terraindiff
