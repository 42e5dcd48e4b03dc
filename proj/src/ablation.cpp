#include "terraindiff/ablation.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "terraindiff/errors.hpp"
#include "terraindiff/metrics.hpp"
#include "terraindiff/seed.hpp"
#include "terraindiff/synth.hpp"

namespace terraindiff {

AblationAxis parse_ablation_axis(const std::string& s) {
  for (AblationAxis a : all_ablation_axes())
    if (to_string(a) == s) return a;
  throw InputError("unknown ablation axis: " + s);
}

std::string to_string(AblationAxis a) {
  switch (a) {
    case AblationAxis::no_diffusion_unet: return "no_diffusion_unet";
    case AblationAxis::absolute_target: return "absolute_target";
    case AblationAxis::no_gating: return "no_gating";
    case AblationAxis::init_mode: return "init_mode";
    case AblationAxis::loss_subset: return "loss_subset";
    case AblationAxis::normalization: return "normalization";
    case AblationAxis::timesteps: return "timesteps";
    case AblationAxis::blend_mode: return "blend_mode";
  }
  return "?";
}

std::vector<AblationAxis> all_ablation_axes() {
  return {AblationAxis::no_diffusion_unet, AblationAxis::absolute_target, AblationAxis::no_gating,
          AblationAxis::init_mode,         AblationAxis::loss_subset,     AblationAxis::normalization,
          AblationAxis::timesteps,         AblationAxis::blend_mode};
}

std::string training_key(const RunConfig& cfg, std::uint64_t corpus_seed) {
  // Inference-only keys do not change the trained weights.
  RunConfig c = cfg;
  c.tile = RunConfig{}.tile;
  c.stride = RunConfig{}.stride;
  c.blend = RunConfig{}.blend;
  c.use_prior = RunConfig{}.use_prior;
  c.init = RunConfig{}.init;
  c.reverse_steps = RunConfig{}.reverse_steps;
  return to_text(c) + "corpus_seed=" + std::to_string(corpus_seed) + "\n";
}

std::shared_ptr<const DenoiserModel> ModelCache::get_or_train(const RunConfig& cfg, std::uint64_t corpus_seed,
                                                              const std::vector<Example>& train,
                                                              const std::vector<Example>& val) {
  const std::string key = training_key(cfg, corpus_seed);
  {
    std::lock_guard lock(mutex_);
    if (auto it = models_.find(key); it != models_.end()) return it->second;
  }
  std::optional<std::filesystem::path> file;
  if (dir_) {
    char name[32];
    std::snprintf(name, sizeof name, "%016llx.fckp",
                  static_cast<unsigned long long>(derive_seed(std::hash<std::string>{}(key), {})));
    file = *dir_ / name;
  }
  std::shared_ptr<const DenoiserModel> model;
  if (file && std::filesystem::exists(*file)) {
    model = std::make_shared<const DenoiserModel>(load_checkpoint(*file));
  } else {
    FitResult r = fit(DenoiserModel::create(cfg.model, cfg.train.seed), train, val, cfg.train);
    model = std::make_shared<const DenoiserModel>(std::move(r.best));
    if (file) {
      std::filesystem::create_directories(*dir_);
      save_checkpoint(*file, *model);
    }
    std::lock_guard lock(mutex_);
    ++trained_;
  }
  std::lock_guard lock(mutex_);
  return models_.emplace(key, model).first->second;
}

Corpus make_corpus(const RunConfig& cfg, std::uint64_t corpus_seed) {
  return {synthetic_corpus(cfg.train_scenes, derive_seed(corpus_seed, {1}), cfg.scene_size, cfg.pixel_size),
          synthetic_corpus(cfg.val_scenes, derive_seed(corpus_seed, {2}), cfg.scene_size, cfg.pixel_size)};
}

namespace {

AblationRow row_from(const std::string& variant, const ValidationResult& v, double identity_rmse,
                     std::string note = {}) {
  return {variant, v.rmse, v.mae, v.e_t1, v.e_t2, v.e_tot, v.rmse < identity_rmse, std::move(note)};
}

std::uint64_t eval_seed(const AblationSpec& spec) { return derive_seed(spec.base.train.seed, {0xe7a1ULL}); }

}  // namespace

std::vector<AblationRow> run_ablation(const AblationSpec& spec, ModelCache& cache) {
  const Corpus corpus = make_corpus(spec.base, spec.corpus_seed);
  const double identity = identity_baseline(corpus.val).rmse;
  const std::uint64_t es = eval_seed(spec);
  std::vector<AblationRow> rows;

  auto trained = [&](const RunConfig& c) { return cache.get_or_train(c, spec.corpus_seed, corpus.train, corpus.val); };
  auto eval = [&](const RunConfig& c, InitKind init, int reverse_steps) {
    return evaluate(*trained(c), corpus.val, init, reverse_steps, es);
  };
  auto variant = [&](const std::string& name, const RunConfig& c, std::string note = {}) {
    rows.push_back(row_from(name, eval(c, c.init, c.reverse_steps), identity, std::move(note)));
  };

  const RunConfig& base = spec.base;
  switch (spec.axis) {
    case AblationAxis::no_diffusion_unet: {
      variant("diffusion", base);
      RunConfig c = base;
      c.model.single_pass = true;
      variant("single_pass_unet", c);
      break;
    }
    case AblationAxis::absolute_target: {
      variant("residual_target", base);
      RunConfig c = base;
      c.model.output = OutputMode::absolute_gated;
      variant("absolute_target", c);
      break;
    }
    case AblationAxis::no_gating: {
      variant("gated", base);
      RunConfig c = base;
      c.model.output = OutputMode::residual_ungated;
      variant("ungated", c);
      break;
    }
    case AblationAxis::init_mode:
      for (InitKind k : {InitKind::noisy_dsm, InitKind::dsm, InitKind::gaussian_noise})
        rows.push_back(row_from("init_" + to_string(k), eval(base, k, base.reverse_steps), identity));
      break;
    case AblationAxis::loss_subset: {
      struct Subset {
        const char* name;
        double l2, lg, lc;
      };
      for (const Subset s : {Subset{"l1", 0, 0, 0}, Subset{"l1_l2", 1, 0, 0}, Subset{"l1_l2_grad", 1, 0.1, 0},
                             Subset{"full", 1, 0.1, 0.1}}) {
        RunConfig c = base;
        c.train.loss.lambda2 = s.l2 * base.train.loss.lambda2;
        c.train.loss.lambda_grad = s.lg > 0 ? base.train.loss.lambda_grad : 0.0;
        c.train.loss.lambda_c = s.lc > 0 ? base.train.loss.lambda_c : 0.0;
        variant(s.name, c);
      }
      break;
    }
    case AblationAxis::normalization: {
      for (NormKind k : {NormKind::minmax, NormKind::global_standardization, NormKind::mean_shift}) {
        RunConfig c = base;
        c.model.norm = k;
        variant("norm_" + to_string(k), c,
                k == NormKind::mean_shift ? "per-sample mean shift, stand-in for data localization" : "");
      }
      break;
    }
    case AblationAxis::timesteps:
      for (int tr : spec.reverse_steps)
        rows.push_back(row_from("T_f=" + std::to_string(base.model.diffusion_steps) + " T_r=" + std::to_string(tr),
                                eval(base, base.init, tr), identity));
      break;
    case AblationAxis::blend_mode: {
      const auto model = trained(base);
      const NetworkDenoiser den(model);
      const DiffusionSchedule sched = model->config.make_schedule();
      const auto scene = synth::generate(synth::random_spec(derive_seed(spec.corpus_seed, {3}), spec.stitch_size,
                                                            base.pixel_size));
      const Mask valid = scene.dsm.validity() & scene.dtm.validity();
      const double scene_identity = regression_metrics(scene.dsm, scene.dtm, valid).rmse;
      auto run = [&](const std::string& name, int stride, BlendMode mode, bool prior) {
        StitchOptions o{base.tile, stride, mode, prior, es, base.reverse_steps};
        const StitchResult r = stitch(sched, den, scene.dsm, o);
        const auto reg = regression_metrics(r.dtm, scene.dtm, valid);
        const auto cls = classification_errors(r.ground_prob, scene.gt_ground, valid);
        rows.push_back({name, reg.rmse, reg.mae, cls.e_t1, cls.e_t2, cls.e_tot, reg.rmse < scene_identity, ""});
      };
      run("no_prior_no_overlap_mean", base.tile, BlendMode::mean, false);
      for (BlendMode m : {BlendMode::mean, BlendMode::min, BlendMode::max, BlendMode::linear, BlendMode::cosine,
                          BlendMode::exp})
        run("prior_overlap_" + to_string(m), base.tile / 2, m, true);
      break;
    }
  }
  for (auto& r : rows)
    if (!r.converged && r.note.empty()) r.note = "non-converged";
  return rows;
}

std::string ablation_csv(const std::vector<AblationRow>& rows) {
  std::ostringstream os;
  os << "variant,rmse,mae,e_t1,e_t2,e_tot,e_sum,status,note\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%s,", r.variant.c_str(), r.rmse, r.mae,
                  r.e_t1, r.e_t2, r.e_tot, r.e_t1 + r.e_t2, r.converged ? "converged" : "non-converged");
    os << buf << r.note << '\n';
  }
  return os.str();
}

}  // namespace terraindiff
