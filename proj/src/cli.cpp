#include "terraindiff/cli.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "terraindiff/ablation.hpp"
#include "terraindiff/config.hpp"
#include "terraindiff/errors.hpp"
#include "terraindiff/fgrid.hpp"
#include "terraindiff/metrics.hpp"
#include "terraindiff/priostitch.hpp"
#include "terraindiff/sampler.hpp"
#include "terraindiff/seed.hpp"
#include "terraindiff/synth.hpp"
#include "terraindiff/trainer.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace terraindiff {

std::string file_checksum(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw FileError("cannot open: " + path.string());
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 16];
  while (f.read(buf, sizeof buf) || f.gcount() > 0) {
    for (std::streamsize i = 0; i < f.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
  return hex;
}

void write_atomic(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw FileError("cannot open for writing: " + tmp.string());
    f << text;
    if (!f) throw FileError("failed writing: " + tmp.string());
  }
  fs::rename(tmp, path);
}

namespace {

// Collects what a run read and wrote; serialized at the end of the run.
struct Manifest {
  std::string command;
  std::vector<std::string> argv;
  std::string config;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, fs::path>> inputs;
  std::vector<fs::path> outputs;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  void write(const fs::path& path) const {
    json j;
    j["command"] = command;
    j["argv"] = argv;
    j["seed"] = seed;
    j["config"] = config;
    json in = json::array();
    for (const auto& [role, p] : inputs)
      in.push_back({{"role", role}, {"path", p.string()}, {"fnv1a64", file_checksum(p)}});
    j["inputs"] = in;
    json out = json::array();
    for (const auto& p : outputs) out.push_back({{"path", p.string()}, {"fnv1a64", file_checksum(p)}});
    j["outputs"] = out;
    j["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_atomic(path, j.dump(2) + "\n");
  }
};

fs::path require_dir(const std::string& out) {
  if (out.empty()) throw InputError("--out is required");
  fs::create_directories(out);
  return out;
}

void require_file(const std::string& p, const char* what) {
  if (p.empty()) throw InputError(std::string("--") + what + " is required");
  if (!fs::exists(p)) throw FileError(std::string("missing ") + what + " file: " + p);
}

void emit_grid(Manifest& m, const fs::path& path, const Grid& g) {
  write_fgrid(path, g);
  m.outputs.push_back(path);
}

void emit_text(Manifest& m, const fs::path& path, const std::string& text) {
  write_atomic(path, text);
  m.outputs.push_back(path);
}

// Config layering shared by train/ablate/schedule-dump: file, then flags, then environment.
struct ConfigFlags {
  std::string file;
  std::vector<std::string> sets;
  std::optional<double> lr;
  std::optional<int> steps;
  std::optional<int> batch;
  std::optional<std::uint64_t> seed;
  std::optional<int> T;

  void attach(CLI::App* app) {
    app->add_option("--config", file, "key=value config file");
    app->add_option("--set", sets, "override a config key (key=value), repeatable");
    app->add_option("--lr", lr, "learning rate");
    app->add_option("--steps", steps, "optimizer step horizon");
    app->add_option("--batch", batch, "batch size");
    app->add_option("--seed", seed, "seed");
    app->add_option("--T", T, "diffusion steps");
  }

  RunConfig resolve(std::vector<std::string>& warnings) const {
    RunConfig cfg;
    if (!file.empty()) {
      if (!fs::exists(file)) throw FileError("missing config file: " + file);
      cfg = load_config(file, &warnings);
    }
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw InputError("--set expects key=value, got " + s);
      apply_setting(cfg, s.substr(0, eq), s.substr(eq + 1));
    }
    if (lr) cfg.train.lr = *lr;
    if (steps) cfg.train.horizon_steps = *steps;
    if (batch) cfg.train.batch_size = *batch;
    if (seed) cfg.train.seed = *seed;
    if (T) cfg.model.diffusion_steps = *T;
    apply_environment(cfg);
    return cfg;
  }
};

// ------------------------------------------------------------------------------------------

struct SynthArgs {
  std::uint64_t seed = 1;
  int size = 64;
  double pixel_size = 1.0;
  int count = 1;
  double noise = 0.0;
  bool preview = false;
  std::string out;
};

int cmd_synth(const SynthArgs& a, Manifest& m) {
  if (a.count < 1 || a.size < 1 || !(a.pixel_size > 0)) throw InputError("count, size and pixel size must be positive");
  const fs::path dir = require_dir(a.out);
  m.seed = a.seed;
  std::string lines;
  for (int i = 0; i < a.count; ++i) {
    const std::uint64_t scene_seed = derive_seed(a.seed, {static_cast<std::uint64_t>(i)});
    auto spec = synth::random_spec(scene_seed, a.size, a.pixel_size);
    spec.noise_sigma = a.noise;
    const synth::Scene sc = synth::generate(spec);
    char prefix[32] = "";
    if (a.count > 1) std::snprintf(prefix, sizeof prefix, "scene_%04d_", i);
    const fs::path dsm = dir / (std::string(prefix) + "dsm.fgrid");
    const fs::path dtm = dir / (std::string(prefix) + "dtm.fgrid");
    const fs::path ground = dir / (std::string(prefix) + "ground.fgrid");
    emit_grid(m, dsm, sc.dsm);
    emit_grid(m, dtm, sc.dtm);
    emit_grid(m, ground, mask_to_grid(sc.gt_ground, sc.dsm.geo()));
    if (a.preview) {
      write_pgm(dir / (std::string(prefix) + "dsm.pgm"), sc.dsm);
      write_pgm(dir / (std::string(prefix) + "dtm.pgm"), sc.dtm);
    }
    const json row = {{"dsm", dsm.filename().string()},
                      {"dtm", dtm.filename().string()},
                      {"ground", ground.filename().string()},
                      {"seed", scene_seed},
                      {"size", a.size},
                      {"pixel_size", a.pixel_size},
                      {"nonground_fraction", sc.nonground_fraction}};
    lines += row.dump() + "\n";
  }
  emit_text(m, dir / "data.jsonl", lines);
  m.write(dir / "manifest.json");
  return kExitOk;
}

// Data manifest written by `synth`: one JSON object per line with dsm/dtm/ground paths relative to it.
std::vector<Example> load_data(const fs::path& manifest, Manifest& m) {
  if (!fs::exists(manifest)) throw FileError("missing data manifest: " + manifest.string());
  std::ifstream f(manifest);
  std::vector<json> rows;
  std::string line;
  int n = 0;
  while (std::getline(f, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      rows.push_back(json::parse(line));
    } catch (const std::exception& e) {
      throw InputError("data manifest line " + std::to_string(n) + ": " + e.what());
    }
  }
  m.inputs.emplace_back("data", manifest);
  const fs::path base = manifest.parent_path();
  std::vector<Example> out;
  for (const auto& s : rows) {
    Grid dsm = read_fgrid(base / s.at("dsm").get<std::string>());
    Grid dtm = read_fgrid(base / s.at("dtm").get<std::string>());
    if (!dsm.same_shape(dtm)) throw InputError("dsm/dtm shape mismatch in data manifest");
    const Mask valid = dsm.validity() & dtm.validity();
    Mask ground = s.contains("ground") ? grid_to_mask(read_fgrid(base / s.at("ground").get<std::string>()))
                                       : ground_mask(dsm, dtm, 0.25);
    out.push_back({std::move(dsm), std::move(dtm), valid, std::move(ground)});
  }
  return out;
}

struct TrainArgs {
  ConfigFlags cfg;
  std::string data;
  std::string val;
  std::uint64_t corpus_seed = 7;
  std::string out;
  bool quiet = false;
};

int cmd_train(const TrainArgs& a, Manifest& m) {
  std::vector<std::string> warnings;
  const RunConfig cfg = a.cfg.resolve(warnings);
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
  const fs::path dir = require_dir(a.out);
  m.seed = cfg.train.seed;
  m.config = to_text(cfg);

  std::vector<Example> train, val;
  if (!a.data.empty()) {
    train = load_data(a.data, m);
    if (!a.val.empty()) {
      val = load_data(a.val, m);
    } else {
      // Hold out the last sixth for validation.
      const std::size_t n_val = std::max<std::size_t>(1, train.size() / 6);
      if (train.size() < 2) throw InputError("need at least two scenes to split off validation");
      val.assign(train.end() - static_cast<std::ptrdiff_t>(n_val), train.end());
      train.resize(train.size() - n_val);
    }
  } else {
    Corpus c = make_corpus(cfg, a.corpus_seed);
    train = std::move(c.train);
    val = std::move(c.val);
  }
  const ValidationResult identity = identity_baseline(val);
  if (!a.quiet)
    std::cerr << "identity baseline: rmse " << identity.rmse << " m, e_tot " << identity.e_tot << " %\n";

  FitResult r = fit(DenoiserModel::create(cfg.model, cfg.train.seed), train, val, cfg.train,
                    [&](const TrainLogRow& row, const ValidationRow* v) {
                      if (a.quiet) return;
                      if (v)
                        std::cerr << "step " << row.step << " loss " << row.loss.total << " val rmse " << v->rmse
                                  << " e_tot " << v->e_tot << "\n";
                      else if (row.step % 50 == 0)
                        std::cerr << "step " << row.step << " loss " << row.loss.total << " lr " << row.lr << "\n";
                    });
  const fs::path ckpt = dir / "model.fckp";
  save_checkpoint(ckpt, r.best);
  m.outputs.push_back(ckpt);
  emit_text(m, dir / "train_log.csv", train_log_csv(r.log));
  emit_text(m, dir / "val_log.csv", validation_csv(r.validation));
  if (!a.quiet) std::cerr << "best validation rmse " << r.best_rmse << " m after " << r.steps << " steps\n";
  m.write(dir / "manifest.json");
  return kExitOk;
}

struct InferArgs {
  std::string dsm;
  std::string ckpt;
  std::string init = "noisy-dsm";
  int steps = 0;
  std::uint64_t seed = 1;
  std::string out;
  bool preview = false;
};

int cmd_infer(const InferArgs& a, Manifest& m) {
  require_file(a.dsm, "dsm");
  require_file(a.ckpt, "ckpt");
  const InitKind init = parse_init_kind(a.init);
  if (init == InitKind::prior_dtm) throw InputError("infer supports noise, dsm and noisy-dsm init");
  if (a.steps < 0) throw InputError("--steps must be >= 0");
  const fs::path dir = require_dir(a.out);
  m.seed = a.seed;
  m.inputs = {{"dsm", a.dsm}, {"ckpt", a.ckpt}};
  const Grid s = read_fgrid(a.dsm);
  const auto model = std::make_shared<const DenoiserModel>(load_checkpoint(a.ckpt));
  m.config = to_json(model->config);
  const NetworkDenoiser den(model);
  std::mt19937_64 rng(a.seed);
  const SampleResult r = sample(model->config.make_schedule(), den, s, InitMode::of(init), a.steps, rng);
  emit_grid(m, dir / "dtm.fgrid", r.dtm);
  emit_grid(m, dir / "ground_prob.fgrid", r.ground_prob);
  if (a.preview) {
    write_pgm(dir / "dtm.pgm", r.dtm);
    write_pgm(dir / "ground_prob.pgm", r.ground_prob);
  }
  m.write(dir / "manifest.json");
  return kExitOk;
}

struct StitchArgs {
  std::string dsm;
  std::string ckpt;
  int tile = 64;
  int stride = 32;
  std::string blend = "min";
  bool no_prior = false;
  std::uint64_t seed = 1;
  int steps = 0;
  bool estimate_only = false;
  double per_step = 0.06;
  int width = 0;
  int height = 0;
  int T = 0;
  std::string out;
  bool preview = false;
};

int cmd_stitch(const StitchArgs& a, Manifest& m) {
  const BlendMode mode = parse_blend_mode(a.blend);
  if (a.estimate_only) {
    int w = a.width, h = a.height, T = a.T;
    if (!a.dsm.empty()) {
      require_file(a.dsm, "dsm");
      const Grid s = read_fgrid(a.dsm);
      w = s.width();
      h = s.height();
    }
    if (T == 0 && !a.ckpt.empty()) {
      require_file(a.ckpt, "ckpt");
      T = load_checkpoint(a.ckpt).config.diffusion_steps;
    }
    if (T == 0) T = 10;
    if (w <= 0 || h <= 0) throw InputError("--estimate-only needs --dsm or --width/--height");
    const double secs = estimate_runtime(w, h, a.tile, a.stride, a.steps > 0 ? a.steps : T, a.per_step);
    const TileLayout l = tile_grid(w, h, a.tile, a.stride);
    std::printf("tiles: %d x %d = %d\n", l.nx, l.ny, l.nx * l.ny);
    std::printf("estimated runtime: %g s\n", secs);
    return kExitOk;
  }
  require_file(a.dsm, "dsm");
  require_file(a.ckpt, "ckpt");
  const fs::path dir = require_dir(a.out);
  m.seed = a.seed;
  m.inputs = {{"dsm", a.dsm}, {"ckpt", a.ckpt}};
  const Grid s = read_fgrid(a.dsm);
  const auto model = std::make_shared<const DenoiserModel>(load_checkpoint(a.ckpt));
  m.config = to_json(model->config);
  const NetworkDenoiser den(model);
  const StitchOptions opt{a.tile, a.stride, mode, !a.no_prior, a.seed, a.steps};
  const StitchResult r = stitch(model->config.make_schedule(), den, s, opt);
  emit_grid(m, dir / "dtm.fgrid", r.dtm);
  emit_grid(m, dir / "ground_prob.fgrid", r.ground_prob);
  if (r.prior) emit_grid(m, dir / "prior.fgrid", *r.prior);
  if (a.preview) write_pgm(dir / "dtm.pgm", r.dtm);
  m.write(dir / "manifest.json");
  return kExitOk;
}

struct EvalArgs {
  std::string pred;
  std::string truth;
  std::string prob;
  std::string gt_mask;
  std::string points;
  bool smooth = false;
  bool error_grid = false;
  std::string out;
};

std::vector<GroundPoint> read_points(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw FileError("cannot open: " + path.string());
  std::vector<GroundPoint> pts;
  std::string line;
  int n = 0;
  while (std::getline(f, line)) {
    ++n;
    if (line.empty() || line[0] == '#') continue;
    GroundPoint p;
    char c1 = 0, c2 = 0;
    std::istringstream ss(line);
    if (!(ss >> p.x >> c1 >> p.y >> c2 >> p.z) || c1 != ',' || c2 != ',') {
      if (n == 1) continue;  // header
      throw InputError("points line " + std::to_string(n) + ": expected x,y,z");
    }
    pts.push_back(p);
  }
  return pts;
}

int cmd_eval(const EvalArgs& a, Manifest& m) {
  require_file(a.pred, "pred");
  require_file(a.truth, "truth");
  const fs::path dir = require_dir(a.out);
  m.inputs = {{"pred", a.pred}, {"truth", a.truth}};
  Grid pred = read_fgrid(a.pred);
  if (a.smooth) pred = laplacian_smooth(pred);
  const Grid truth = read_fgrid(a.truth);
  if (!pred.same_shape(truth)) throw InputError("pred/truth shape mismatch");
  const Mask valid = pred.validity() & truth.validity();
  const RegressionMetrics reg = regression_metrics(pred, truth, valid);

  std::ostringstream csv;
  csv.precision(17);
  csv << "rmse,mae,e_t1,e_t2,e_tot,e_sum,med,med_points,mad\n" << reg.rmse << ',' << reg.mae << ',';
  if (!a.prob.empty() || !a.gt_mask.empty()) {
    require_file(a.prob, "prob");
    require_file(a.gt_mask, "gt-mask");
    m.inputs.emplace_back("prob", a.prob);
    m.inputs.emplace_back("gt_mask", a.gt_mask);
    const ClassificationMetrics c =
        classification_errors(read_fgrid(a.prob), grid_to_mask(read_fgrid(a.gt_mask)), valid);
    csv << c.e_t1 << ',' << c.e_t2 << ',' << c.e_tot << ',' << c.e_sum << ',';
  } else {
    csv << ",,,,";
  }
  if (!a.points.empty()) {
    require_file(a.points, "points");
    m.inputs.emplace_back("points", a.points);
    const MedResult r = med(pred, read_points(a.points));
    if (r.skipped > 0) std::cerr << "med: skipped " << r.skipped << " points outside the raster\n";
    csv << r.med << ',' << r.used << ',';
  } else {
    csv << ",,";
  }
  csv << mad(pred) << '\n';
  emit_text(m, dir / "metrics.csv", csv.str());
  if (a.error_grid) {
    std::vector<float> err(pred.size(), std::numeric_limits<float>::quiet_NaN());
    for (std::size_t i = 0; i < err.size(); ++i)
      if (valid[i]) err[i] = pred[i] - truth[i];
    emit_grid(m, dir / "error.fgrid", pred.with_values(std::move(err)));
  }
  std::cout << csv.str();
  m.write(dir / "manifest.json");
  return kExitOk;
}

struct AblateArgs {
  ConfigFlags cfg;
  std::string axis = "all";
  std::optional<int> budget;
  std::uint64_t corpus_seed = 7;
  std::string cache;
  std::string out;
};

int cmd_ablate(const AblateArgs& a, Manifest& m) {
  std::vector<std::string> warnings;
  RunConfig cfg = a.cfg.resolve(warnings);
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
  if (a.budget) cfg.train.horizon_steps = *a.budget;
  const fs::path dir = require_dir(a.out);
  m.seed = cfg.train.seed;
  m.config = to_text(cfg);
  std::vector<AblationAxis> axes;
  if (a.axis == "all")
    axes = all_ablation_axes();
  else
    axes.push_back(parse_ablation_axis(a.axis));
  ModelCache cache(a.cache.empty() ? std::nullopt : std::optional<fs::path>(a.cache));
  for (AblationAxis axis : axes) {
    AblationSpec spec;
    spec.axis = axis;
    spec.base = cfg;
    spec.corpus_seed = a.corpus_seed;
    const auto rows = run_ablation(spec, cache);
    const std::string csv = ablation_csv(rows);
    emit_text(m, dir / (to_string(axis) + ".csv"), csv);
    std::cout << "# " << to_string(axis) << "\n" << csv;
  }
  m.write(dir / "manifest.json");
  return kExitOk;
}

struct ScheduleArgs {
  ConfigFlags cfg;
  std::string schedule;
  std::optional<double> beta_min, beta_max;
  std::string out;
};

int cmd_schedule(const ScheduleArgs& a, Manifest& m) {
  std::vector<std::string> warnings;
  RunConfig cfg = a.cfg.resolve(warnings);
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
  if (!a.schedule.empty()) cfg.model.schedule = parse_schedule_kind(a.schedule);
  if (a.beta_min) cfg.model.beta_min = *a.beta_min;
  if (a.beta_max) cfg.model.beta_max = *a.beta_max;
  const std::string csv = schedule_csv(cfg.model.make_schedule());
  if (a.out.empty()) {
    std::cout << csv;
    return kExitOk;
  }
  m.config = to_text(cfg);
  m.seed = cfg.train.seed;
  emit_text(m, a.out, csv);
  fs::path mp = a.out;
  mp += ".manifest.json";
  m.write(mp);
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"terraindiff: DSM to DTM conversion with gated conditional diffusion"};
  app.require_subcommand(1);

  SynthArgs sa;
  auto* synth = app.add_subcommand("synth", "generate synthetic DSM/DTM scenes");
  synth->add_option("--seed", sa.seed);
  synth->add_option("--size", sa.size);
  synth->add_option("--pixel-size", sa.pixel_size);
  synth->add_option("--count", sa.count);
  synth->add_option("--noise", sa.noise, "DSM sensor noise sigma (m)");
  synth->add_flag("--preview", sa.preview, "also write PGM previews");
  synth->add_option("--out", sa.out)->required();

  TrainArgs ta;
  auto* train = app.add_subcommand("train", "train a denoiser");
  ta.cfg.attach(train);
  train->add_option("--data", ta.data, "data manifest from synth (default: synthetic corpus from config)");
  train->add_option("--val", ta.val, "validation data manifest");
  train->add_option("--corpus-seed", ta.corpus_seed);
  train->add_option("--out", ta.out)->required();
  train->add_flag("--quiet", ta.quiet);

  InferArgs ia;
  auto* infer = app.add_subcommand("infer", "run the reverse process on a DSM");
  infer->add_option("--dsm", ia.dsm)->required();
  infer->add_option("--ckpt", ia.ckpt)->required();
  infer->add_option("--init", ia.init, "noise | dsm | noisy-dsm");
  infer->add_option("--steps", ia.steps, "reverse steps (0 = trained T)");
  infer->add_option("--seed", ia.seed);
  infer->add_option("--out", ia.out)->required();
  infer->add_flag("--preview", ia.preview);

  StitchArgs sta;
  auto* stitch_cmd = app.add_subcommand("stitch", "tiled inference on a large DSM");
  stitch_cmd->add_option("--dsm", sta.dsm);
  stitch_cmd->add_option("--ckpt", sta.ckpt);
  stitch_cmd->add_option("--tile", sta.tile);
  stitch_cmd->add_option("--stride", sta.stride);
  stitch_cmd->add_option("--blend", sta.blend, "mean | min | max | linear | cosine | exp");
  stitch_cmd->add_flag("--no-prior", sta.no_prior);
  stitch_cmd->add_option("--seed", sta.seed);
  stitch_cmd->add_option("--steps", sta.steps);
  stitch_cmd->add_flag("--estimate-only", sta.estimate_only);
  stitch_cmd->add_option("--per-step-seconds", sta.per_step);
  stitch_cmd->add_option("--width", sta.width);
  stitch_cmd->add_option("--height", sta.height);
  stitch_cmd->add_option("--T", sta.T);
  stitch_cmd->add_option("--out", sta.out);
  stitch_cmd->add_flag("--preview", sta.preview);

  EvalArgs ea;
  auto* eval = app.add_subcommand("eval", "metrics of a predicted DTM");
  eval->add_option("--pred", ea.pred)->required();
  eval->add_option("--truth", ea.truth)->required();
  eval->add_option("--prob", ea.prob);
  eval->add_option("--gt-mask", ea.gt_mask);
  eval->add_option("--points", ea.points, "CSV of x,y,z ground points");
  eval->add_flag("--smooth", ea.smooth, "Laplacian smoothing (20 iterations, 0.5) before scoring");
  eval->add_flag("--error-grid", ea.error_grid);
  eval->add_option("--out", ea.out)->required();

  AblateArgs aa;
  auto* ablate = app.add_subcommand("ablate", "run ablation axes on a synthetic corpus");
  aa.cfg.attach(ablate);
  ablate->add_option("--axis", aa.axis, "axis name or all");
  ablate->add_option("--budget", aa.budget, "optimizer steps per trained variant");
  ablate->add_option("--corpus-seed", aa.corpus_seed);
  ablate->add_option("--cache", aa.cache, "directory for trained-model checkpoints");
  ablate->add_option("--out", aa.out)->required();

  ScheduleArgs sca;
  auto* sched = app.add_subcommand("schedule-dump", "print the diffusion schedule as CSV");
  sca.cfg.attach(sched);
  sched->add_option("--schedule", sca.schedule, "cosine_beta | cosine_alpha_bar");
  sched->add_option("--beta-min", sca.beta_min);
  sched->add_option("--beta-max", sca.beta_max);
  sched->add_option("--out", sca.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  Manifest m;
  for (int i = 0; i < argc; ++i) m.argv.emplace_back(argv[i]);
  try {
    if (synth->parsed()) return m.command = "synth", cmd_synth(sa, m);
    if (train->parsed()) return m.command = "train", cmd_train(ta, m);
    if (infer->parsed()) return m.command = "infer", cmd_infer(ia, m);
    if (stitch_cmd->parsed()) return m.command = "stitch", cmd_stitch(sta, m);
    if (eval->parsed()) return m.command = "eval", cmd_eval(ea, m);
    if (ablate->parsed()) return m.command = "ablate", cmd_ablate(aa, m);
    if (sched->parsed()) return m.command = "schedule-dump", cmd_schedule(sca, m);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const FileError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNoInput;
  } catch (const DivergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDivergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSoftware;
  }
  return kExitUsage;
}

}  // namespace terraindiff
