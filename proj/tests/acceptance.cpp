// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and exits non-zero
// if any criterion fails.
//
// Arguments restrict the run to the listed criterion numbers.
// TERRAINDIFF_ACCEPTANCE_CACHE=<dir> keeps trained models between runs (development only).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "terraindiff/ablation.hpp"
#include "terraindiff/cli.hpp"
#include "terraindiff/metrics.hpp"
#include "terraindiff/parallel.hpp"
#include "terraindiff/priostitch.hpp"
#include "terraindiff/sampler.hpp"
#include "terraindiff/schedule.hpp"
#include "terraindiff/seed.hpp"
#include "terraindiff/synth.hpp"
#include "terraindiff/trainer.hpp"

using namespace terraindiff;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

struct Verdict {
  bool pass = true;
  std::string detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + std::string("FAILED ") + what;
    }
  }
  void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

int failures = 0;
std::set<int> only;  // criteria named on the command line; empty runs all

void report(int id, const char* name, const std::function<Verdict()>& body) {
  if (!only.empty() && !only.count(id)) return;
  const auto t0 = Clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v.pass = false;
    v.detail = std::string("exception: ") + e.what();
  }
  if (!v.pass) ++failures;
  std::printf("criterion %d: %s - %s (%s) [%.1f s]\n", id, v.pass ? "PASS" : "FAIL", name, v.detail.c_str(),
              seconds_since(t0));
  std::fflush(stdout);
}

// Desk-scale training recipe shared by criteria 4, 5 and 7. Architecture, loss weights,
// schedule and T are the library defaults; the optimizer budget is sized for a small CPU.
constexpr int kTrainSteps = 2000;
constexpr std::uint64_t kCorpusSeed = 20240601;

RunConfig desk_config() {
  RunConfig c;
  c.train_scenes = 200;
  c.val_scenes = 40;
  c.scene_size = 64;
  c.train.patch = 64;
  c.train.batch_size = 8;
  c.train.lr = 1e-3;
  c.train.warmup_steps = 100;
  c.train.horizon_steps = kTrainSteps;
  c.train.val_every = 250;
  c.train.seed = 1;
  return c;
}

ModelCache& cache() {
  static ModelCache c = [] {
    if (const char* d = std::getenv("TERRAINDIFF_ACCEPTANCE_CACHE"); d && *d) return ModelCache(fs::path(d));
    return ModelCache();
  }();
  return c;
}

const AblationRow& row(const std::vector<AblationRow>& rows, const std::string& name) {
  for (const auto& r : rows)
    if (r.variant == name) return r;
  throw std::runtime_error("missing ablation row " + name);
}

// ------------------------------------------------------------------------------------------

Verdict schedule_forward() {
  Verdict v;
  const int n = 100000;
  int checked = 0;
  double worst = 0.0;
  for (ScheduleKind kind : {ScheduleKind::cosine_beta, ScheduleKind::cosine_alpha_bar}) {
    const auto sched = make_schedule(kind, 10);
    std::mt19937_64 rng(derive_seed(1, {static_cast<std::uint64_t>(kind)}));
    std::normal_distribution<double> nd(0.0, 1.0);
    const double g0v = 0.6;
    const Grid g0 = Grid::filled(n, 1, static_cast<float>(g0v));
    for (int t = 1; t <= 10; ++t) {
      std::vector<float> e(n);
      for (auto& x : e) x = static_cast<float>(nd(rng));
      const Grid out = forward_sample(sched, g0, t, Grid(n, 1, std::move(e)));
      double mean = 0.0;
      for (std::size_t i = 0; i < out.size(); ++i) mean += out[i];
      mean /= n;
      double var = 0.0;
      for (std::size_t i = 0; i < out.size(); ++i) var += (out[i] - mean) * (out[i] - mean);
      var /= n - 1;
      const double s2 = 1.0 - sched.alpha_bar[t];
      const double z_mean = std::abs(mean - std::sqrt(sched.alpha_bar[t]) * g0v) / std::sqrt(s2 / n);
      const double z_var = std::abs(var - s2) / (s2 * std::sqrt(2.0 / (n - 1)));
      worst = std::max({worst, z_mean, z_var});
      v.require(z_mean < 3.0, fmt("%s t=%d mean z=%.2f", to_string(kind).c_str(), t, z_mean));
      v.require(z_var < 3.0, fmt("%s t=%d variance z=%.2f", to_string(kind).c_str(), t, z_var));
      ++checked;
    }
  }
  v.note(fmt("%d (schedule, t) cells, worst |z| = %.2f", checked, worst));
  return v;
}

Verdict posterior() {
  Verdict v;
  const auto c = posterior_coefficients(schedule_from_betas({0.1, 0.2, 0.5}), 2);
  v.require(std::abs(c.c_pred - 0.6776) < 1e-4, fmt("c_pred %.6f", c.c_pred));
  v.require(std::abs(c.c_state - 0.3194) < 1e-4, fmt("c_state %.6f", c.c_state));
  v.require(std::abs(c.var - 0.07143) < 1e-4, fmt("var %.6f", c.var));

  // Elevations are float32 in meters; 1e-6 is applied relative to the elevation magnitude.
  auto sc = synth::generate(synth::random_spec(5, 64));
  double worst_rel = 0.0, worst_abs = 0.0;
  for (int T : {1, 5, 10}) {
    const auto sched = make_schedule(ScheduleKind::cosine_alpha_bar, T);
    const OracleDenoiser oracle(sc.dtm, T);
    for (InitKind k : {InitKind::gaussian_noise, InitKind::dsm, InitKind::noisy_dsm}) {
      std::mt19937_64 rng(derive_seed(3, {static_cast<std::uint64_t>(T), static_cast<std::uint64_t>(k)}));
      const auto r = sample(sched, oracle, sc.dsm, InitMode::of(k), T, rng);
      for (std::size_t i = 0; i < r.dtm.size(); ++i) {
        const double err = std::abs(static_cast<double>(r.dtm[i]) - sc.dtm[i]);
        worst_abs = std::max(worst_abs, err);
        worst_rel = std::max(worst_rel, err / std::max(1.0, std::abs(static_cast<double>(sc.dtm[i]))));
      }
    }
  }
  v.require(worst_rel <= 1e-6, fmt("oracle reconstruction relative error %.3g", worst_rel));
  v.note(fmt("t=2 coefficients (%.4f, %.4f, %.5f); oracle max error %.3g m (relative %.3g)", c.c_pred, c.c_state,
             c.var, worst_abs, worst_rel));
  return v;
}

Verdict gradient_fidelity() {
  Verdict v;
  ModelConfig mc;
  mc.arch.base_channels = 4;
  mc.arch.depth = 2;
  mc.arch.timestep_embed_dim = 4;
  mc.arch.use_bottleneck_attention = true;
  UNet<double> net(mc.arch, {}, mc.diffusion_steps);
  const auto& layout = net.layout();
  std::vector<double> params(layout.total());
  {
    std::mt19937_64 rng(7);
    layout.initialize(params, rng);
    std::normal_distribution<double> nd(0.0, 0.15);
    for (auto& p : params) p += nd(rng);  // heads start at zero; move everything off special points
  }
  const int S = 8, n = S * S;
  PreparedSample<double> x;
  x.input = Tensor<double>(2, S, S);
  x.s.resize(n);
  x.g.resize(n);
  x.m.assign(n, 1);
  x.m_alpha.resize(n);
  std::mt19937_64 rng(11);
  std::normal_distribution<double> nd(0.0, 0.5);
  for (int i = 0; i < n; ++i) {
    x.s[i] = nd(rng);
    x.g[i] = x.s[i] - std::abs(nd(rng)) * (i % 4 == 0 ? 0.0 : 1.0);
    x.m_alpha[i] = std::abs(x.s[i] - x.g[i]) < 0.05;
    x.input.channel(0)[i] = 0.8 * x.g[i] + 0.6 * nd(rng);
    x.input.channel(1)[i] = x.s[i];
  }
  x.t = 6;

  std::vector<double> grads(params.size(), 0.0);
  objective<double>(net, mc.output, params.data(), grads.data(), x, LossWeights{});

  // Stratified sample: several entries from every block, then uniform extras.
  std::vector<std::size_t> picks;
  for (const auto& b : layout.blocks()) {
    std::uniform_int_distribution<std::size_t> u(0, b.size - 1);
    for (int k = 0; k < 2; ++k) picks.push_back(b.offset + u(rng));
  }
  // Both output channels of the head: weights are laid out output-major.
  const auto& hw = layout.find("head.weight");
  const auto& hb = layout.find("head.bias");
  for (std::size_t k = 0; k < 3; ++k) {
    picks.push_back(hw.offset + k);
    picks.push_back(hw.offset + hw.size / 2 + k);
  }
  picks.push_back(hb.offset);
  picks.push_back(hb.offset + 1);
  std::uniform_int_distribution<std::size_t> any(0, params.size() - 1);
  while (picks.size() < 300) picks.push_back(any(rng));

  const double h = 1e-4;
  double worst = 0.0;
  int bad = 0;
  for (std::size_t j : picks) {
    const double keep = params[j];
    params[j] = keep + h;
    const double up = objective<double>(net, mc.output, params.data(), nullptr, x, LossWeights{}).total;
    params[j] = keep - h;
    const double dn = objective<double>(net, mc.output, params.data(), nullptr, x, LossWeights{}).total;
    params[j] = keep;
    const double fd = (up - dn) / (2 * h);
    const double rel = std::abs(fd - grads[j]) / std::max({std::abs(fd), std::abs(grads[j]), 1e-8});
    worst = std::max(worst, rel);
    if (rel >= 1e-4) ++bad;
  }
  bool film = false, attn = false, head = false, conv = false;
  for (const auto& b : layout.blocks()) {
    film |= b.name.find("film") != std::string::npos;
    attn |= b.name.find("attn") != std::string::npos;
    head |= b.name.find("head") != std::string::npos;
    conv |= b.name.find("conv") != std::string::npos;
  }
  v.require(film && attn && head && conv, "layer coverage");
  v.require(bad == 0, fmt("%d of %zu parameters above 1e-4 relative error", bad, picks.size()));
  v.note(fmt("%zu parameters over %zu blocks (conv, FiLM, attention, both head channels), max relative error %.3g",
             picks.size(), layout.blocks().size(), worst));
  return v;
}

// Shared trained baseline.
struct Baseline {
  std::shared_ptr<const DenoiserModel> model;
  Corpus corpus;
  double train_seconds = 0.0;
};

Baseline& baseline() {
  static Baseline b = [] {
    Baseline out;
    const RunConfig cfg = desk_config();
    out.corpus = make_corpus(cfg, kCorpusSeed);
    const auto t0 = Clock::now();
    out.model = cache().get_or_train(cfg, kCorpusSeed, out.corpus.train, out.corpus.val);
    out.train_seconds = seconds_since(t0);
    return out;
  }();
  return b;
}

Verdict desk_learning() {
  Verdict v;
  Baseline& b = baseline();
  const auto id = identity_baseline(b.corpus.val);
  const auto r = evaluate(*b.model, b.corpus.val, InitKind::noisy_dsm, 0, 99);
  const double ratio = r.rmse / id.rmse;
  v.require(ratio <= 0.5, fmt("RMSE ratio %.3f", ratio));
  v.require(r.e_tot < 10.0, fmt("E_tot %.2f%%", r.e_tot));
  const bool cached = cache().trained() == 0;
  if (!cached) v.require(b.train_seconds < 1800.0, fmt("training took %.0f s", b.train_seconds));
  v.note(fmt("val RMSE %.3f m vs identity %.3f m (%.1f%%), E_tot %.2f%% (identity %.2f%%), %d steps, %s", r.rmse,
             id.rmse, 100 * ratio, r.e_tot, id.e_tot, kTrainSteps,
             cached ? "model from cache" : fmt("trained in %.0f s on %d worker(s)", b.train_seconds, worker_count()).c_str()));
  return v;
}

Verdict ablation_directions() {
  Verdict v;
  baseline();
  AblationSpec spec;
  spec.base = desk_config();
  spec.corpus_seed = kCorpusSeed;
  auto run = [&](AblationAxis axis) {
    spec.axis = axis;
    return run_ablation(spec, cache());
  };
  const auto gating = run(AblationAxis::no_gating);
  const auto diffusion = run(AblationAxis::no_diffusion_unet);
  const auto target = run(AblationAxis::absolute_target);
  const auto steps = run(AblationAxis::timesteps);

  const double gated = row(gating, "gated").rmse, ungated = row(gating, "ungated").rmse;
  const double diff = row(diffusion, "diffusion").rmse, single = row(diffusion, "single_pass_unet").rmse;
  const double resid = row(target, "residual_target").rmse, absolute = row(target, "absolute_target").rmse;
  v.require(gated <= ungated, "gated <= ungated");
  v.require(diff <= single, "diffusion <= single-pass");
  v.require(resid <= absolute, "residual <= absolute");

  double at10 = 0.0, best = std::numeric_limits<double>::infinity();
  int best_tr = 0;
  std::string sweep;
  for (const auto& r : steps) {
    const int tr = std::stoi(r.variant.substr(r.variant.rfind('=') + 1));
    if (tr == 10) at10 = r.rmse;
    if (r.rmse < best) best = r.rmse, best_tr = tr;
    sweep += fmt("%s%d:%.4f", sweep.empty() ? "" : " ", tr, r.rmse);
  }
  bool tr_ok = best_tr == 10 || at10 <= best;
  for (const auto& r : steps) {
    const int tr = std::stoi(r.variant.substr(r.variant.rfind('=') + 1));
    if (tr > 10 && best_tr == tr && r.rmse >= at10 / 1.02) tr_ok = true;
  }
  v.require(tr_ok, fmt("T_r sweep minimum at T_r=%d", best_tr));
  v.note(fmt("gated %.4f / ungated %.4f; diffusion %.4f / single-pass %.4f; residual %.4f / absolute %.4f; T_r sweep %s",
             gated, ungated, diff, single, resid, absolute, sweep.c_str()));
  return v;
}

Verdict stitch_invariants() {
  Verdict v;
  std::mt19937_64 rng(2024);
  int formula_cases = 0;
  for (int k = 0; k < 20; ++k) {
    const int P = std::uniform_int_distribution<int>(4, 48)(rng);
    const int W = std::uniform_int_distribution<int>(P, 300)(rng);
    const int H = std::uniform_int_distribution<int>(P, 300)(rng);
    const int S = std::uniform_int_distribution<int>(1, P)(rng);
    const auto L = tile_grid(W, H, P, S);
    // Brute force: step origins by S until the raster end is reached.
    auto count = [&](int extent) {
      int n = 1;
      for (int o = 0; o + P < extent; o += S) ++n;
      return n;
    };
    v.require(L.nx == count(W) && L.ny == count(H), fmt("tile count W=%d H=%d P=%d S=%d", W, H, P, S));
    v.require(L.nx == static_cast<int>(std::ceil(static_cast<double>(W - P) / S)) + 1, "closed-form count");
    std::vector<std::uint8_t> cover(static_cast<std::size_t>(W) * H, 0);
    for (const auto& t : L.tiles) {
      v.require(t.row0 >= 0 && t.col0 >= 0 && t.row0 + P <= H && t.col0 + P <= W, "tile in bounds");
      for (int r = t.row0; r < t.row0 + P; ++r)
        std::fill_n(cover.begin() + static_cast<std::ptrdiff_t>(r) * W + t.col0, P, 1);
    }
    v.require(std::count(cover.begin(), cover.end(), 0) == 0, "exhaustive coverage");
    ++formula_cases;
  }

  // Identical tile values under every blend.
  const auto sched = make_schedule(ScheduleKind::cosine_alpha_bar, 10);
  const Grid flat = Grid::filled(160, 130, 87.3f);
  const OracleDenoiser flat_oracle(flat, 10);
  double worst_equal = 0.0;
  for (BlendMode m : {BlendMode::mean, BlendMode::min, BlendMode::max, BlendMode::linear, BlendMode::cosine,
                      BlendMode::exp}) {
    const auto r = stitch(sched, flat_oracle, flat, {64, 24, m, true, 1, 0});
    for (std::size_t i = 0; i < r.dtm.size(); ++i)
      worst_equal = std::max(worst_equal, std::abs(r.dtm[i] - 87.3) / 87.3);
  }
  v.require(worst_equal <= 1e-6, fmt("identical-value blend error %.3g", worst_equal));

  // Ordering with a trained model whose tiles disagree in overlaps.
  const NetworkDenoiser den(baseline().model);
  const auto msched = baseline().model->config.make_schedule();
  const auto scene = synth::generate(synth::random_spec(77, 160));
  auto run = [&](BlendMode m) { return stitch(msched, den, scene.dsm, {64, 32, m, true, 3, 0}); };
  const auto lo = run(BlendMode::min), mid = run(BlendMode::mean), hi = run(BlendMode::max);
  bool ordered = true;
  for (std::size_t i = 0; i < lo.dtm.size(); ++i) ordered &= lo.dtm[i] <= mid.dtm[i] && mid.dtm[i] <= hi.dtm[i];
  v.require(ordered, "min <= mean <= max");

  // Single tile against direct sampling.
  const auto small = synth::generate(synth::random_spec(78, 64));
  const auto one = stitch(msched, den, small.dsm, {64, 32, BlendMode::min, false, 5, 0});
  std::mt19937_64 trng(tile_seed(5, 0));
  const auto direct = sample(msched, den, small.dsm, InitMode::of(InitKind::noisy_dsm), 0, trng);
  const bool same = std::equal(one.dtm.values().begin(), one.dtm.values().end(), direct.dtm.values().begin(),
                               [](float a, float b) { return std::memcmp(&a, &b, sizeof a) == 0; });
  v.require(same, "single tile equals direct sample");
  v.note(fmt("%d random layouts brute-force checked; identical-value blend error %.2g; ordering and single-tile ok",
             formula_cases, worst_equal));
  return v;
}

Verdict stitch_quality() {
  Verdict v;
  baseline();
  AblationSpec spec;
  spec.base = desk_config();
  spec.corpus_seed = kCorpusSeed;
  spec.axis = AblationAxis::blend_mode;
  spec.stitch_size = 512;
  const auto rows = run_ablation(spec, cache());
  const double best = row(rows, "prior_overlap_min").rmse;
  const double plain = row(rows, "no_prior_no_overlap_mean").rmse;
  v.require(best <= plain, "prior + overlap + min <= no prior, no overlap");
  std::string all;
  for (const auto& r : rows) all += fmt("%s%s %.4f", all.empty() ? "" : ", ", r.variant.c_str(), r.rmse);
  v.note("512x512 scene: " + all);
  return v;
}

Verdict metric_oracles() {
  Verdict v;
  std::mt19937_64 rng(31);
  std::normal_distribution<double> nd(0.0, 2.0);
  std::uniform_real_distribution<float> u(0.f, 1.f);
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    std::vector<float> a(256), b(256), p(256);
    std::vector<std::uint8_t> m(256), g(256);
    for (int i = 0; i < 256; ++i) {
      a[i] = static_cast<float>(nd(rng));
      b[i] = static_cast<float>(nd(rng));
      p[i] = u(rng);
      m[i] = u(rng) > 0.1f;
      g[i] = u(rng) > 0.5f;
    }
    double se = 0, ae = 0;
    std::size_t n = 0, ng = 0, nn = 0, miss = 0, kept = 0;
    for (int i = 0; i < 256; ++i) {
      if (!m[i]) continue;
      const double d = static_cast<double>(a[i]) - b[i];
      se += d * d;
      ae += std::abs(d);
      ++n;
      const bool pred = p[i] >= 0.5f;
      if (g[i]) {
        ++ng;
        miss += !pred;
      } else {
        ++nn;
        kept += pred;
      }
    }
    const auto r = regression_metrics(Grid(16, 16, a), Grid(16, 16, b), Mask(16, 16, m));
    const auto c = classification_errors(Grid(16, 16, p), Mask(16, 16, g), Mask(16, 16, m));
    worst = std::max({worst, std::abs(r.rmse - std::sqrt(se / n)), std::abs(r.mae - ae / n),
                      std::abs(c.e_t1 - 100.0 * kept / nn), std::abs(c.e_t2 - 100.0 * miss / ng),
                      std::abs(c.e_tot - 100.0 * (kept + miss) / n)});
  }
  v.require(worst <= 1e-12, fmt("metric deviation %.3g", worst));

  // Planes representable exactly in float32.
  double plane_mad = 0.0;
  for (const auto [a, b, c, ps] : {std::tuple{0.0, 0.0, 5.0, 1.0}, std::tuple{0.5, 0.25, 100.0, 1.0},
                                   std::tuple{-1.25, 0.375, 37.5, 0.5}, std::tuple{3.0, -2.0, 0.0, 2.0}}) {
    std::vector<float> z(40 * 30);
    for (int r = 0; r < 30; ++r)
      for (int col = 0; col < 40; ++col) z[r * 40 + col] = static_cast<float>(a * col + b * r + c);
    plane_mad = std::max(plane_mad, mad(Grid(40, 30, z, GeoRef{0, 0, ps})));
  }
  v.require(plane_mad == 0.0, fmt("plane MAD %.3g", plane_mad));

  int grids = 0;
  bool reduced = true;
  auto check = [&](const Grid& g) {
    ++grids;
    const double before = mad(g), after = mad(laplacian_smooth(g, 20, 0.5));
    reduced &= after < before;
  };
  for (std::uint64_t s = 1; s <= 10; ++s) {
    const auto sc = synth::generate(synth::random_spec(s, 48));
    check(sc.dsm);
    check(sc.dtm);
  }
  for (std::uint64_t s = 1; s <= 5; ++s) {
    std::mt19937_64 r(s);
    std::vector<float> z(32 * 32);
    for (auto& x : z) x = static_cast<float>(nd(r));
    check(Grid(32, 32, z));
  }
  std::vector<float> spike(15 * 15, 2.f);
  spike[7 * 15 + 7] = 9.f;
  check(Grid(15, 15, spike));
  v.require(reduced, "smoothing reduces MAD on every non-planar grid");
  v.note(fmt("max deviation from brute force %.2g; plane MAD %.1f; MAD reduced on %d grids", worst, plane_mad, grids));
  return v;
}

std::vector<std::string> cli_artifacts(const fs::path& dir) {
  fs::remove_all(dir);
  auto cli = [](std::vector<std::string> args) {
    std::vector<const char*> argv{"terraindiff"};
    for (auto& a : args) argv.push_back(a.c_str());
    const int code = run_cli(static_cast<int>(argv.size()), argv.data());
    if (code != 0) throw std::runtime_error("cli exit " + std::to_string(code) + " for " + args[0]);
  };
  const std::string d = dir.string();
  cli({"synth", "--seed", "9", "--size", "64", "--count", "6", "--out", d + "/data"});
  cli({"synth", "--seed", "10", "--size", "128", "--out", d + "/big"});
  cli({"train", "--data", d + "/data/data.jsonl", "--steps", "12", "--batch", "4", "--seed", "3", "--set",
       "warmup_steps=2", "--set", "base_channels=8", "--set", "embed_dim=8", "--quiet", "--out", d + "/model"});
  cli({"infer", "--dsm", d + "/big/dsm.fgrid", "--ckpt", d + "/model/model.fckp", "--seed", "4", "--out", d + "/infer"});
  cli({"stitch", "--dsm", d + "/big/dsm.fgrid", "--ckpt", d + "/model/model.fckp", "--tile", "64", "--stride", "32",
       "--seed", "4", "--out", d + "/stitch"});
  std::vector<std::string> sums;
  for (const char* f : {"data/data.jsonl", "data/scene_0000_dsm.fgrid", "data/scene_0005_dtm.fgrid",
                        "data/scene_0003_ground.fgrid", "model/model.fckp", "model/train_log.csv", "model/val_log.csv",
                        "infer/dtm.fgrid", "infer/ground_prob.fgrid", "stitch/dtm.fgrid", "stitch/ground_prob.fgrid"})
    sums.push_back(std::string(f) + "=" + file_checksum(dir / f));
  return sums;
}

Verdict determinism() {
  Verdict v;
  const fs::path root = fs::temp_directory_path() / "terraindiff_acceptance_determinism";
  const auto a = cli_artifacts(root / "a");
  const auto b = cli_artifacts(root / "b");
  std::size_t same = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    v.require(a[i] == b[i], a[i] + " vs " + b[i]);
    same += a[i] == b[i];
  }
  fs::remove_all(root);
  v.note(fmt("%zu of %zu artifacts bit-identical across two synth/train/infer/stitch runs", same, a.size()));
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  std::printf("acceptance: %d worker(s), training budget %d steps\n", worker_count(), kTrainSteps);
  report(1, "forward process moments", schedule_forward);
  report(2, "posterior and oracle sampling", posterior);
  report(3, "analytic gradients vs finite differences", gradient_fidelity);
  report(4, "desk-scale learning", desk_learning);
  report(5, "ablation directions", ablation_directions);
  report(6, "tiling and blending invariants", stitch_invariants);
  report(7, "stitch quality ordering", stitch_quality);
  report(8, "metric oracles", metric_oracles);
  report(9, "determinism", determinism);
  std::printf("acceptance: %d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
