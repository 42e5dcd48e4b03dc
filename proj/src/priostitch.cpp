#include "terraindiff/priostitch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "terraindiff/errors.hpp"
#include "terraindiff/parallel.hpp"
#include "terraindiff/resample.hpp"
#include "terraindiff/seed.hpp"

namespace terraindiff {

BlendMode parse_blend_mode(const std::string& s) {
  if (s == "mean") return BlendMode::mean;
  if (s == "min") return BlendMode::min;
  if (s == "max") return BlendMode::max;
  if (s == "linear") return BlendMode::linear;
  if (s == "cosine") return BlendMode::cosine;
  if (s == "exp") return BlendMode::exp;
  throw InputError("unknown blend mode: " + s);
}

std::string to_string(BlendMode m) {
  switch (m) {
    case BlendMode::mean: return "mean";
    case BlendMode::min: return "min";
    case BlendMode::max: return "max";
    case BlendMode::linear: return "linear";
    case BlendMode::cosine: return "cosine";
    case BlendMode::exp: return "exp";
  }
  return "?";
}

bool is_selection(BlendMode m) { return m == BlendMode::min || m == BlendMode::max; }

namespace {

std::vector<int> axis_origins(int extent, int P, int S, int& count) {
  count = (extent - P + S - 1) / S + 1;
  std::vector<int> o(count);
  for (int k = 0; k < count; ++k) o[k] = std::min(k * S, extent - P);
  return o;
}

}  // namespace

TileLayout tile_grid(int width, int height, int P, int S) {
  if (P < 1) throw InputError("tile size must be positive");
  if (P > width || P > height) throw InputError("input smaller than tile");
  if (S < 1 || S > P) throw InputError("stride must be in [1, P]");
  TileLayout l{width, height, P, S, 0, 0, {}};
  const auto xs = axis_origins(width, P, S, l.nx);
  const auto ys = axis_origins(height, P, S, l.ny);
  for (int y : ys)
    for (int x : xs) l.tiles.push_back({y, x});
  return l;
}

std::vector<double> blend_weights(BlendMode mode, int P, int S) {
  if (P < 1 || S < 1 || S > P) throw InputError("invalid tile geometry");
  const int o = P - S;
  std::vector<double> axis(P, 1.0);
  if (!is_selection(mode) && mode != BlendMode::mean && o > 0) {
    for (int i = 0; i < P; ++i) {
      const double u = static_cast<double>(std::min(std::min(i, P - 1 - i) + 1, o + 1)) / (o + 1);
      switch (mode) {
        case BlendMode::linear: axis[i] = u; break;
        case BlendMode::cosine: axis[i] = 0.5 * (1.0 - std::cos(std::numbers::pi * u)); break;
        case BlendMode::exp: axis[i] = 1.0 - std::exp(-4.0 * u); break;
        default: break;
      }
    }
  }
  std::vector<double> w(static_cast<std::size_t>(P) * P);
  for (int r = 0; r < P; ++r)
    for (int c = 0; c < P; ++c) w[static_cast<std::size_t>(r) * P + c] = axis[r] * axis[c];
  return w;
}

std::uint64_t tile_seed(std::uint64_t seed, std::size_t tile_index) {
  return derive_seed(seed, {0x711eULL, static_cast<std::uint64_t>(tile_index)});
}

Grid build_prior(const DiffusionSchedule& sched, const Denoiser& den, const Grid& s, int P, std::uint64_t seed,
                 int reverse_steps) {
  if (s.width() < P || s.height() < P) return s;
  std::mt19937_64 rng(derive_seed(seed, {0x9410ULL}));
  const Grid low = resize_bilinear(s, P, P);
  const Window whole{{}, 0, 0, s.height(), s.width()};
  const SampleResult r = sample(sched, den, low, InitMode::of(InitKind::noisy_dsm), reverse_steps, rng, whole);
  Grid up = resize_bilinear(r.dtm, s.width(), s.height());
  // Keep the source georeferencing and nodata layout.
  std::vector<float> v(up.values().begin(), up.values().end());
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!std::isfinite(s[i])) v[i] = std::numeric_limits<float>::quiet_NaN();
  return s.with_values(std::move(v));
}

StitchResult stitch(const DiffusionSchedule& sched, const Denoiser& den, const Grid& s, const StitchOptions& opt) {
  StitchResult res;
  res.layout = tile_grid(s.width(), s.height(), opt.P, opt.S);
  if (opt.use_prior) res.prior = build_prior(sched, den, s, opt.P, opt.seed, opt.reverse_steps);
  const int n = static_cast<int>(res.layout.tiles.size());
  const int P = opt.P;

  std::vector<SampleResult> tiles(n);
  parallel_for(n, [&](int k) {
    const TileOrigin t = res.layout.tiles[k];
    try {
      const Grid s_tile = s.crop(t.row0, t.col0, P, P);
      InitMode mode = InitMode::of(InitKind::noisy_dsm);
      if (res.prior) mode = InitMode::from_prior(res.prior->crop(t.row0, t.col0, P, P));
      std::mt19937_64 rng(tile_seed(opt.seed, k));
      tiles[k] = sample(sched, den, s_tile, mode, opt.reverse_steps, rng, Window{{}, t.row0, t.col0, P, P});
    } catch (const InputError& e) {
      throw InputError("tile " + std::to_string(k) + ": " + e.what());
    } catch (const std::exception& e) {
      throw std::runtime_error("tile " + std::to_string(k) + ": " + e.what());
    }
  });

  const std::size_t N = s.size();
  const int W = s.width();
  const std::vector<double> w = blend_weights(opt.mode, P, opt.S);
  const bool select = is_selection(opt.mode);
  std::vector<double> num(N, 0.0), den_w(N, 0.0), pnum(N, 0.0), pden(N, 0.0);
  std::vector<double> pick(N, opt.mode == BlendMode::min ? std::numeric_limits<double>::infinity()
                                                          : -std::numeric_limits<double>::infinity());
  std::vector<std::uint8_t> seen(N, 0);
  for (int k = 0; k < n; ++k) {
    const TileOrigin t = res.layout.tiles[k];
    const SampleResult& r = tiles[k];
    for (int y = 0; y < P; ++y) {
      for (int x = 0; x < P; ++x) {
        const std::size_t local = static_cast<std::size_t>(y) * P + x;
        const std::size_t gi = static_cast<std::size_t>(t.row0 + y) * W + (t.col0 + x);
        const double v = r.dtm[local];
        if (!std::isfinite(v)) continue;
        seen[gi] = 1;
        const double wt = select ? 1.0 : w[local];
        if (select)
          pick[gi] = opt.mode == BlendMode::min ? std::min(pick[gi], v) : std::max(pick[gi], v);
        else {
          num[gi] += wt * v;
          den_w[gi] += wt;
        }
        pnum[gi] += wt * r.ground_prob[local];
        pden[gi] += wt;
      }
    }
  }
  constexpr float nan = std::numeric_limits<float>::quiet_NaN();
  std::vector<float> dtm(N, nan), prob(N, nan);
  for (std::size_t i = 0; i < N; ++i) {
    if (!seen[i]) continue;
    dtm[i] = static_cast<float>(select ? pick[i] : num[i] / den_w[i]);
    prob[i] = static_cast<float>(pnum[i] / pden[i]);
  }
  res.dtm = s.with_values(std::move(dtm));
  res.ground_prob = s.with_values(std::move(prob));
  return res;
}

double estimate_runtime(int width, int height, int P, int S, int steps, double per_step_seconds) {
  const TileLayout l = tile_grid(width, height, P, S);
  return static_cast<double>(l.nx) * l.ny * per_step_seconds * steps;
}

}  // namespace terraindiff
