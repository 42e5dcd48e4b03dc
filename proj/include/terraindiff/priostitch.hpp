#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "terraindiff/sampler.hpp"

namespace terraindiff {

enum class BlendMode { mean, min, max, linear, cosine, exp };

BlendMode parse_blend_mode(const std::string& s);
std::string to_string(BlendMode m);
bool is_selection(BlendMode m);

struct TileOrigin {
  int row0 = 0;
  int col0 = 0;
};

struct TileLayout {
  int width = 0;
  int height = 0;
  int P = 0;
  int S = 0;
  int nx = 0;
  int ny = 0;
  std::vector<TileOrigin> tiles;  // row-major over (ny, nx)
};

// N = ceil((W - P) / S) + 1 per axis; the last tile is shifted back to end at the raster edge.
TileLayout tile_grid(int width, int height, int P, int S);

// P*P weight field, row-major. Selection modes and zero overlap give all ones.
std::vector<double> blend_weights(BlendMode mode, int P, int S);

// Per-tile rng seed.
std::uint64_t tile_seed(std::uint64_t seed, std::size_t tile_index);

// Low-resolution DTM prior: resize to P x P, sample from the noisy DSM, resize back.
// Rasters smaller than P in either axis are returned unchanged.
Grid build_prior(const DiffusionSchedule& sched, const Denoiser& den, const Grid& s, int P, std::uint64_t seed,
                 int reverse_steps = 0);

struct StitchOptions {
  int P = 64;
  int S = 32;
  BlendMode mode = BlendMode::min;
  bool use_prior = true;
  std::uint64_t seed = 1;
  int reverse_steps = 0;  // 0 = trained T
};

struct StitchResult {
  Grid dtm;
  Grid ground_prob;
  std::optional<Grid> prior;
  TileLayout layout;
};

StitchResult stitch(const DiffusionSchedule& sched, const Denoiser& den, const Grid& s, const StitchOptions& opt);

// Tile count times per-step cost times steps.
double estimate_runtime(int width, int height, int P, int S, int steps, double per_step_seconds = 0.06);

}  // namespace terraindiff
