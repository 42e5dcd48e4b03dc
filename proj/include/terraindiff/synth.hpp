#pragma once

#include <cstdint>

#include "terraindiff/grid.hpp"

namespace terraindiff::synth {

struct SceneSpec {
  std::uint64_t seed = 1;
  int size = 64;
  double pixel_size = 1.0;
  double terrain_roughness = 0.5;  // in [0, 1]
  int building_count = 3;
  int tree_count = 4;
  double max_building_height = 15.0;
  double max_tree_height = 12.0;
  double noise_sigma = 0.0;  // zero-mean sensor noise added to the DSM only
};

struct Scene {
  Grid dsm;
  Grid dtm;
  Mask gt_ground;         // true where no structure was placed
  double nonground_fraction = 0.0;
};

// Smooth multi-octave ground plus flat-roofed box buildings and clamped Gaussian tree crowns.
// Deterministic in the spec. Without sensor noise dsm >= dtm everywhere.
Scene generate(const SceneSpec& spec);

// Scene spec with structure counts drawn from the seed and scaled with area (64x64 baseline).
SceneSpec random_spec(std::uint64_t seed, int size, double pixel_size = 1.0);

}  // namespace terraindiff::synth
