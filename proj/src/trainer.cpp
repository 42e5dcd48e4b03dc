#include "terraindiff/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <numbers>
#include <numeric>
#include <sstream>

#include "terraindiff/errors.hpp"
#include "terraindiff/metrics.hpp"
#include "terraindiff/parallel.hpp"
#include "terraindiff/seed.hpp"
#include "terraindiff/synth.hpp"

namespace terraindiff {

void TrainConfig::validate(const ArchSpec& arch) const {
  if (!(lr >= 0.0) || !(weight_decay >= 0.0)) throw InputError("lr and weight_decay must be non-negative");
  if (batch_size < 1 || max_epochs < 1 || horizon_steps < 1) throw InputError("batch, epochs and horizon must be positive");
  if (warmup_steps < 0 || warmup_steps >= horizon_steps) throw InputError("warmup must be in [0, horizon)");
  if (patch <= 0 || patch % arch.divisor() != 0) throw InputError("patch must be divisible by 2^depth");
  if (!(alpha > 0.0)) throw InputError("alpha must be positive");
  if (early_stop_patience < 0 || val_every < 0) throw InputError("patience and val_every must be non-negative");
  if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0 && adam_eps > 0.0))
    throw InputError("invalid Adam hyper-parameters");
}

std::vector<Example> synthetic_corpus(int count, std::uint64_t seed, int size, double pixel_size) {
  if (count < 0) throw InputError("corpus size must be non-negative");
  std::vector<Example> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    const auto spec = synth::random_spec(derive_seed(seed, {static_cast<std::uint64_t>(i)}), size, pixel_size);
    synth::Scene sc = synth::generate(spec);
    const Mask valid = sc.dsm.validity() & sc.dtm.validity();
    out.push_back({std::move(sc.dsm), std::move(sc.dtm), valid, std::move(sc.gt_ground)});
  }
  return out;
}

std::pair<double, double> corpus_statistics(const std::vector<Example>& corpus) {
  double sum = 0.0, sq = 0.0;
  std::size_t n = 0;
  for (const auto& ex : corpus) {
    for (std::size_t i = 0; i < ex.dsm.size(); ++i) {
      if (!ex.valid[i]) continue;
      for (double v : {static_cast<double>(ex.dsm[i]), static_cast<double>(ex.dtm[i])}) {
        sum += v;
        sq += v * v;
        ++n;
      }
    }
  }
  if (n == 0) throw InputError("empty corpus");
  const double mean = sum / static_cast<double>(n);
  const double var = std::max(sq / static_cast<double>(n) - mean * mean, 0.0);
  return {mean, var > 0.0 ? std::sqrt(var) : 1.0};
}

template <class T>
void adamw_update(std::span<T> params, std::span<const T> grads, OptimizerState& opt, double lr, const AdamParams& a) {
  if (grads.size() != params.size() || opt.m.size() != params.size() || opt.v.size() != params.size())
    throw InputError("optimizer state does not match parameters");
  ++opt.step;
  const double bc1 = 1.0 - std::pow(a.beta1, static_cast<double>(opt.step));
  const double bc2 = 1.0 - std::pow(a.beta2, static_cast<double>(opt.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    double p = params[i];
    const double g = grads[i];
    p -= lr * a.weight_decay * p;
    opt.m[i] = a.beta1 * opt.m[i] + (1.0 - a.beta1) * g;
    opt.v[i] = a.beta2 * opt.v[i] + (1.0 - a.beta2) * g * g;
    p -= lr * (opt.m[i] / bc1) / (std::sqrt(opt.v[i] / bc2) + a.eps);
    params[i] = static_cast<T>(p);
  }
}

template void adamw_update<float>(std::span<float>, std::span<const float>, OptimizerState&, double, const AdamParams&);
template void adamw_update<double>(std::span<double>, std::span<const double>, OptimizerState&, double,
                                   const AdamParams&);

double lr_at(std::int64_t step, const TrainConfig& cfg) {
  if (step <= 0) return cfg.warmup_steps > 0 ? 0.0 : cfg.lr;
  if (step < cfg.warmup_steps) return cfg.lr * static_cast<double>(step) / cfg.warmup_steps;
  if (step >= cfg.horizon_steps) return 0.0;
  const double progress =
      static_cast<double>(step - cfg.warmup_steps) / static_cast<double>(cfg.horizon_steps - cfg.warmup_steps);
  return cfg.lr * 0.5 * (1.0 + std::cos(std::numbers::pi * progress));
}

PreparedSample<float> prepare_sample(const Example& ex, const ModelConfig& model, const DiffusionSchedule& sched,
                                     const TrainConfig& cfg, std::mt19937_64& rng) {
  AugmentedSample a{ex.dsm, ex.dtm, ex.valid};
  if (cfg.augment) {
    AugmentConfig aug = cfg.augmentation;
    aug.patch = cfg.patch;
    a = augment(ex.dsm, ex.dtm, ex.valid, aug, rng);
  }
  check_divisible(model.arch, a.s.width(), a.s.height());
  const AffineMap map = training_map(model, a.s, a.g, a.m);
  const std::size_t n = a.s.size();
  PreparedSample<float> x;
  x.s.resize(n);
  x.g.resize(n);
  x.m.resize(n);
  x.m_alpha.resize(n);
  const double alpha_n = cfg.alpha * std::abs(map.scale);
  for (std::size_t i = 0; i < n; ++i) {
    const bool ok = a.m[i];
    x.m[i] = ok;
    x.s[i] = ok ? static_cast<float>(map.apply(a.s[i])) : 0.f;
    x.g[i] = ok ? static_cast<float>(map.apply(a.g[i])) : 0.f;
    x.m_alpha[i] = ok && std::abs(static_cast<double>(x.s[i]) - x.g[i]) < alpha_n;
  }
  x.spacing = a.s.pixel_size();
  const int T = sched.steps;
  x.t = std::uniform_int_distribution<int>(1, T)(rng);
  x.input = Tensor<float>(2, a.s.height(), a.s.width());
  float* gt = x.input.channel(0);
  float* sc = x.input.channel(1);
  std::copy(x.s.begin(), x.s.end(), sc);
  if (model.single_pass) {
    x.t = T;
    std::copy(x.s.begin(), x.s.end(), gt);
  } else {
    const double ka = std::sqrt(sched.alpha_bar[x.t]);
    const double kn = std::sqrt(1.0 - sched.alpha_bar[x.t]);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) gt[i] = static_cast<float>(ka * x.g[i] + kn * normal(rng));
  }
  return x;
}

template <class T>
LossBreakdown objective(UNet<T>& net, OutputMode mode, const T* params, T* grads, const PreparedSample<T>& x,
                        const LossWeights& w) {
  const Tensor<T> y = net.forward(params, x.input, x.t);
  const std::size_t n = y.plane();
  const std::span<const T> first(y.channel(0), n), logits(y.channel(1), n);
  std::vector<T> g_hat(n);
  fuse_arrays<T>(mode, first, logits, x.s, g_hat);
  const LossInputs<T> in{g_hat, x.g, logits, x.m_alpha, x.m, y.w, y.h, x.spacing};
  if (!grads) return evaluate_loss<T>(in, w);
  std::vector<T> d_ghat(n);
  Tensor<T> dout(2, y.h, y.w);
  const std::span<T> d_first(dout.channel(0), n), d_logits(dout.channel(1), n);
  const LossBreakdown loss = evaluate_loss<T>(in, w, d_ghat, d_logits);
  fuse_backward<T>(mode, first, logits, x.s, d_ghat, d_first, d_logits);
  net.backward(params, grads, dout);
  return loss;
}

template LossBreakdown objective<float>(UNet<float>&, OutputMode, const float*, float*, const PreparedSample<float>&,
                                        const LossWeights&);
template LossBreakdown objective<double>(UNet<double>&, OutputMode, const double*, double*,
                                         const PreparedSample<double>&, const LossWeights&);

namespace {

bool finite(const LossBreakdown& b) {
  return std::isfinite(b.l1) && std::isfinite(b.l2) && std::isfinite(b.lgrad) && std::isfinite(b.lc) &&
         std::isfinite(b.total);
}

}  // namespace

LossBreakdown train_step(DenoiserModel& model, std::span<const Example* const> batch, const DiffusionSchedule& sched,
                         const TrainConfig& cfg, OptimizerState& opt, std::mt19937_64& rng) {
  if (batch.empty()) throw InputError("empty batch");
  const std::size_t P = model.parameters.size();
  if (opt.m.size() != P) throw InputError("optimizer state does not match parameters");
  const int B = static_cast<int>(batch.size());
  std::vector<std::uint64_t> seeds(B);
  for (auto& s : seeds) s = rng();

  std::vector<std::vector<float>> grads(B);
  std::vector<LossBreakdown> losses(B);
  parallel_for(B, [&](int i) {
    std::mt19937_64 r(seeds[i]);
    const PreparedSample<float> x = prepare_sample(*batch[i], model.config, sched, cfg, r);
    UNet<float> net(model.config.arch, {}, model.config.diffusion_steps);
    grads[i].assign(P, 0.f);
    losses[i] = objective<float>(net, model.config.output, model.parameters.data(), grads[i].data(), x, cfg.loss);
  });

  LossBreakdown mean;
  for (const auto& l : losses) {
    mean.l1 += l.l1 / B;
    mean.l2 += l.l2 / B;
    mean.lgrad += l.lgrad / B;
    mean.lc += l.lc / B;
    mean.total += l.total / B;
  }
  std::vector<float> g(P);
  bool grads_finite = true;
  for (std::size_t j = 0; j < P; ++j) {
    double acc = 0.0;
    for (int i = 0; i < B; ++i) acc += grads[i][j];
    g[j] = static_cast<float>(acc / B);
    grads_finite = grads_finite && std::isfinite(g[j]);
  }
  if (!finite(mean) || !grads_finite) throw DivergenceError("divergence");
  const AdamParams ap{cfg.beta1, cfg.beta2, cfg.adam_eps, cfg.weight_decay};
  adamw_update<float>(model.parameters, g, opt, lr_at(opt.step + 1, cfg), ap);
  return mean;
}

ValidationResult evaluate(const DenoiserModel& model, const std::vector<Example>& set, InitKind init, int reverse_steps,
                          std::uint64_t seed) {
  if (set.empty()) throw InputError("empty validation set");
  const auto snapshot = std::make_shared<const DenoiserModel>(model);
  const NetworkDenoiser den(snapshot);
  const DiffusionSchedule sched = model.config.make_schedule();
  std::vector<SampleResult> results(set.size());
  parallel_for(static_cast<int>(set.size()), [&](int i) {
    std::mt19937_64 rng(derive_seed(seed, {static_cast<std::uint64_t>(i)}));
    results[i] = sample(sched, den, set[i].dsm, InitMode::of(init), reverse_steps, rng);
  });
  RegressionAccumulator reg;
  ClassificationAccumulator cls;
  for (std::size_t i = 0; i < set.size(); ++i) {
    reg.add(results[i].dtm, set[i].dtm, set[i].valid);
    cls.add(results[i].ground_prob, set[i].ground, set[i].valid);
  }
  const auto r = reg.result();
  const auto c = cls.result();
  return {r.rmse, r.mae, c.e_t1, c.e_t2, c.e_tot};
}

ValidationResult identity_baseline(const std::vector<Example>& set) {
  RegressionAccumulator reg;
  ClassificationAccumulator cls;
  for (const auto& ex : set) {
    reg.add(ex.dsm, ex.dtm, ex.valid);
    cls.add(Grid::filled(ex.dsm.width(), ex.dsm.height(), 1.f), ex.ground, ex.valid);
  }
  const auto r = reg.result();
  const auto c = cls.result();
  return {r.rmse, r.mae, c.e_t1, c.e_t2, c.e_tot};
}

FitResult fit(DenoiserModel model, const std::vector<Example>& train, const std::vector<Example>& val,
              const TrainConfig& cfg, const ProgressFn& progress) {
  if (train.empty() || val.empty()) throw InputError("training and validation sets must be non-empty");
  cfg.validate(model.config.arch);
  if (model.config.norm == NormKind::global_standardization)
    std::tie(model.config.norm_mean, model.config.norm_std) = corpus_statistics(train);
  const DiffusionSchedule sched = model.config.make_schedule();
  OptimizerState opt = OptimizerState::zeros(model.parameters.size());

  FitResult res{model, {}, {}, std::numeric_limits<double>::infinity(), 0, false};
  const int N = static_cast<int>(train.size());
  const int B = std::min(cfg.batch_size, N);
  const int batches = (N + B - 1) / B;
  const std::uint64_t val_seed = derive_seed(cfg.seed, {0x7661ULL});
  int since_best = 0;
  std::int64_t step = 0;

  auto validate = [&]() -> bool {
    const ValidationResult v = evaluate(model, val, cfg.val_init, 0, val_seed);
    const ValidationRow row{step, v.rmse, v.mae, v.e_tot};
    res.validation.push_back(row);
    if (v.rmse < res.best_rmse) {
      res.best_rmse = v.rmse;
      res.best = model;
      since_best = 0;
    } else {
      ++since_best;
    }
    if (progress) progress(res.log.back(), &res.validation.back());
    return since_best >= cfg.early_stop_patience;
  };

  for (int epoch = 0; epoch < cfg.max_epochs && step < cfg.horizon_steps; ++epoch) {
    std::vector<int> order(N);
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 shuffle_rng(derive_seed(cfg.seed, {0x5eedULL, static_cast<std::uint64_t>(epoch)}));
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    for (int b = 0; b < batches && step < cfg.horizon_steps; ++b) {
      std::vector<const Example*> batch;
      for (int i = b * B; i < std::min(N, (b + 1) * B); ++i) batch.push_back(&train[order[i]]);
      std::mt19937_64 rng(derive_seed(cfg.seed, {0x57e9ULL, static_cast<std::uint64_t>(step)}));
      const double lr = lr_at(step + 1, cfg);
      const LossBreakdown loss = train_step(model, batch, sched, cfg, opt, rng);
      ++step;
      res.log.push_back({step, loss, lr});
      const bool last = step >= cfg.horizon_steps || (epoch + 1 == cfg.max_epochs && b + 1 == batches);
      const bool due = cfg.val_every > 0 ? step % cfg.val_every == 0 : b + 1 == batches;
      if (due || last) {
        if (validate()) {
          res.early_stopped = true;
          res.steps = step;
          return res;
        }
      } else if (progress) {
        progress(res.log.back(), nullptr);
      }
    }
  }
  res.steps = step;
  return res;
}

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string train_log_csv(const std::vector<TrainLogRow>& rows) {
  std::ostringstream os;
  os << "step,l1,l2,lgrad,lc,total,lr\n";
  for (const auto& r : rows)
    os << r.step << ',' << fmt(r.loss.l1) << ',' << fmt(r.loss.l2) << ',' << fmt(r.loss.lgrad) << ','
       << fmt(r.loss.lc) << ',' << fmt(r.loss.total) << ',' << fmt(r.lr) << '\n';
  return os.str();
}

std::string validation_csv(const std::vector<ValidationRow>& rows) {
  std::ostringstream os;
  os << "step,rmse,mae,e_tot\n";
  for (const auto& r : rows) os << r.step << ',' << fmt(r.rmse) << ',' << fmt(r.mae) << ',' << fmt(r.e_tot) << '\n';
  return os.str();
}

}  // namespace terraindiff
