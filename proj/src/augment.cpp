#include "terraindiff/augment.hpp"

#include <algorithm>
#include <cmath>

#include "terraindiff/errors.hpp"
#include "terraindiff/resample.hpp"

namespace terraindiff {

AugmentConfig AugmentConfig::disabled(int patch) {
  AugmentConfig c;
  c.patch = patch;
  c.p_rot90 = c.p_jitter = c.p_scale = c.p_flip_h = c.p_flip_v = 0.0;
  return c;
}

namespace {

bool coin(std::mt19937_64& rng, double p) {
  // Always consume a draw so later decisions do not shift with probabilities.
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  return u < p;
}

}  // namespace

AugmentedSample augment(const Grid& s, const Grid& g, const Mask& m, const AugmentConfig& cfg, std::mt19937_64& rng) {
  if (!s.same_shape(g) || !m.matches(s)) throw InputError("augment operand shape mismatch");
  if (cfg.patch <= 0) throw InputError("patch must be positive");
  AugmentedSample a{s, g, m};

  const bool do_rot = coin(rng, cfg.p_rot90);
  const int k = std::uniform_int_distribution<int>(1, 3)(rng);
  if (do_rot) {
    a.s = rot90(a.s, k);
    a.g = rot90(a.g, k);
    a.m = rot90(a.m, k);
  }

  const bool do_jitter = coin(rng, cfg.p_jitter);
  const double angle = std::uniform_real_distribution<double>(-cfg.jitter_degrees, cfg.jitter_degrees)(rng);
  if (do_jitter && angle != 0.0) {
    a.s = rotate_bilinear(a.s, angle);
    a.g = rotate_bilinear(a.g, angle);
    a.m = rotate_nearest(a.m, angle);
  }

  const bool do_scale = coin(rng, cfg.p_scale) && !cfg.scale_factors.empty();
  const std::size_t pick = cfg.scale_factors.empty()
                               ? 0
                               : std::uniform_int_distribution<std::size_t>(0, cfg.scale_factors.size() - 1)(rng);
  const int short_side = std::min(a.s.width(), a.s.height());
  int target = short_side;
  if (do_scale) target = cfg.scale_factors[pick] * cfg.patch;
  if (target < cfg.patch) target = cfg.patch;  // degenerate input: upsample, then centre crop
  if (target != short_side) {
    const double f = static_cast<double>(target) / short_side;
    const int w = std::max(cfg.patch, static_cast<int>(std::lround(a.s.width() * f)));
    const int h = std::max(cfg.patch, static_cast<int>(std::lround(a.s.height() * f)));
    a.s = resize_bilinear(a.s, w, h);
    a.g = resize_bilinear(a.g, w, h);
    a.m = resize_nearest(a.m, w, h);
  }

  const int slack_r = a.s.height() - cfg.patch, slack_c = a.s.width() - cfg.patch;
  const int r0 = std::uniform_int_distribution<int>(0, slack_r)(rng);
  const int c0 = std::uniform_int_distribution<int>(0, slack_c)(rng);
  if (slack_r > 0 || slack_c > 0) {
    a.s = a.s.crop(r0, c0, cfg.patch, cfg.patch);
    a.g = a.g.crop(r0, c0, cfg.patch, cfg.patch);
    a.m = crop(a.m, r0, c0, cfg.patch, cfg.patch);
  }

  if (coin(rng, cfg.p_flip_h)) {
    a.s = flip_horizontal(a.s);
    a.g = flip_horizontal(a.g);
    a.m = flip_horizontal(a.m);
  }
  if (coin(rng, cfg.p_flip_v)) {
    a.s = flip_vertical(a.s);
    a.g = flip_vertical(a.g);
    a.m = flip_vertical(a.m);
  }

  a.m = a.m & a.s.validity() & a.g.validity();
  return a;
}

}  // namespace terraindiff
