#include "terraindiff/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "terraindiff/errors.hpp"

namespace terraindiff::synth {

namespace {

struct Wave {
  double kx, ky, phase, amp;
};

std::vector<double> ground_surface(const SceneSpec& spec, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int n = spec.size;
  const double extent = n * spec.pixel_size;
  const double rough = std::clamp(spec.terrain_roughness, 0.0, 1.0);
  const double persistence = 0.35 + 0.4 * rough;
  const double relief = 4.0 + 4.0 * rough;
  // Wavelengths are fixed in meters so tiles of a large scene look like small scenes.
  const double base_wavelength = 160.0;

  std::vector<Wave> waves;
  double amp = relief;
  for (int octave = 0; octave < 6; ++octave) {
    const double wavelength = base_wavelength / std::pow(2.0, octave);
    for (int j = 0; j < 2; ++j) {
      const double theta = 2.0 * std::numbers::pi * unit(rng);
      const double k = 2.0 * std::numbers::pi / wavelength;
      waves.push_back({k * std::cos(theta), k * std::sin(theta), 2.0 * std::numbers::pi * unit(rng),
                       amp * (0.6 + 0.4 * unit(rng))});
    }
    amp *= persistence;
  }
  const double base = 50.0 + 100.0 * unit(rng);
  const double slope_x = 0.06 * (unit(rng) - 0.5);
  const double slope_y = 0.06 * (unit(rng) - 0.5);

  std::vector<double> z(static_cast<std::size_t>(n) * n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const double x = (c + 0.5) * spec.pixel_size - 0.5 * extent;
      const double y = (r + 0.5) * spec.pixel_size - 0.5 * extent;
      double v = base + slope_x * x + slope_y * y;
      for (const Wave& w : waves) v += w.amp * std::cos(w.kx * x + w.ky * y + w.phase);
      z[static_cast<std::size_t>(r) * n + c] = v;
    }
  }
  return z;
}

}  // namespace

Scene generate(const SceneSpec& spec) {
  if (spec.size < 16) throw InputError("scene size must be >= 16");
  if (spec.max_building_height < 0 || spec.max_tree_height < 0 || spec.building_count < 0 || spec.tree_count < 0)
    throw InputError("scene heights and counts must be non-negative");

  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int n = spec.size;
  const std::vector<double> ground = ground_surface(spec, rng);
  std::vector<double> surface = ground;
  std::vector<std::uint8_t> structure(ground.size(), 0);

  const auto px = [&](double meters) { return std::max(1, static_cast<int>(std::lround(meters / spec.pixel_size))); };

  for (int b = 0; b < spec.building_count; ++b) {
    const int bw = px(5.0 + 9.0 * unit(rng));
    const int bh = px(5.0 + 9.0 * unit(rng));
    const int c0 = static_cast<int>(unit(rng) * (n - std::min(bw, n)));
    const int r0 = static_cast<int>(unit(rng) * (n - std::min(bh, n)));
    const double height = std::min(3.0, spec.max_building_height) +
                          std::max(0.0, spec.max_building_height - 3.0) * unit(rng);
    if (height <= 0.0) continue;
    double footprint_top = -1e300;
    for (int r = r0; r < std::min(n, r0 + bh); ++r)
      for (int c = c0; c < std::min(n, c0 + bw); ++c) footprint_top = std::max(footprint_top, ground[r * n + c]);
    const double roof = footprint_top + height;
    for (int r = r0; r < std::min(n, r0 + bh); ++r) {
      for (int c = c0; c < std::min(n, c0 + bw); ++c) {
        const std::size_t i = static_cast<std::size_t>(r) * n + c;
        surface[i] = std::max(surface[i], roof);
        structure[i] = 1;
      }
    }
  }

  for (int t = 0; t < spec.tree_count; ++t) {
    const double sigma = (1.0 + 2.0 * unit(rng)) / spec.pixel_size;
    const double radius = 1.6 * sigma;
    const double cx = unit(rng) * n;
    const double cy = unit(rng) * n;
    const double height = std::min(2.0, spec.max_tree_height) +
                          std::max(0.0, spec.max_tree_height - 2.0) * unit(rng);
    if (height <= 0.0) continue;
    const int rr = static_cast<int>(std::ceil(radius));
    for (int r = std::max(0, static_cast<int>(cy) - rr); r <= std::min(n - 1, static_cast<int>(cy) + rr); ++r) {
      for (int c = std::max(0, static_cast<int>(cx) - rr); c <= std::min(n - 1, static_cast<int>(cx) + rr); ++c) {
        const double dx = c + 0.5 - cx;
        const double dy = r + 0.5 - cy;
        const double d2 = dx * dx + dy * dy;
        if (d2 > radius * radius) continue;
        const std::size_t i = static_cast<std::size_t>(r) * n + c;
        const double crown = ground[i] + height * std::exp(-d2 / (2.0 * sigma * sigma));
        surface[i] = std::max(surface[i], crown);
        structure[i] = 1;
      }
    }
  }

  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<float> dsm(surface.size()), dtm(ground.size());
  std::vector<std::uint8_t> gt(ground.size());
  std::size_t nonground = 0;
  for (std::size_t i = 0; i < ground.size(); ++i) {
    dtm[i] = static_cast<float>(ground[i]);
    // Structures are rounded to float separately so that dsm == dtm holds bit-exactly off-structure.
    dsm[i] = structure[i] ? std::max(static_cast<float>(surface[i]), dtm[i]) : dtm[i];
    gt[i] = structure[i] ? 0 : 1;
    nonground += structure[i];
  }
  if (spec.noise_sigma > 0.0)
    for (float& v : dsm) v += static_cast<float>(spec.noise_sigma * noise(rng));

  const GeoRef geo{0.0, n * spec.pixel_size, spec.pixel_size};
  Scene scene{Grid(n, n, std::move(dsm), geo), Grid(n, n, std::move(dtm), geo), Mask(n, n, std::move(gt)), 0.0};
  scene.nonground_fraction = static_cast<double>(nonground) / static_cast<double>(ground.size());
  return scene;
}

SceneSpec random_spec(std::uint64_t seed, int size, double pixel_size) {
  std::mt19937_64 rng(seed ^ 0x9E3779B97F4A7C15ull);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double area_scale = (size * pixel_size) * (size * pixel_size) / (64.0 * 64.0);
  SceneSpec spec;
  spec.seed = seed;
  spec.size = size;
  spec.pixel_size = pixel_size;
  spec.terrain_roughness = unit(rng);
  spec.building_count = static_cast<int>(std::lround((1.0 + 4.0 * unit(rng)) * area_scale));
  spec.tree_count = static_cast<int>(std::lround((1.0 + 6.0 * unit(rng)) * area_scale));
  spec.max_building_height = 6.0 + 14.0 * unit(rng);
  spec.max_tree_height = 4.0 + 10.0 * unit(rng);
  return spec;
}

}  // namespace terraindiff::synth
