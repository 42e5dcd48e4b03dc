#include "doctest_main.hpp"

#include <cmath>
#include <cstring>
#include <limits>
#include <random>
#include <vector>

#include "terraindiff/augment.hpp"
#include "terraindiff/errors.hpp"
#include "terraindiff/resample.hpp"
#include "terraindiff/trainer.hpp"

using namespace terraindiff;

namespace {

// Textbook AdamW with decoupled decay, written independently of the library.
struct RefAdamW {
  std::vector<double> m, v;
  long long t = 0;
  void step(std::vector<double>& p, const std::vector<double>& g, double lr, double b1, double b2, double eps,
            double wd) {
    if (m.empty()) {
      m.assign(p.size(), 0.0);
      v.assign(p.size(), 0.0);
    }
    ++t;
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(t));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(t));
    for (std::size_t i = 0; i < p.size(); ++i) {
      p[i] -= lr * wd * p[i];
      m[i] = b1 * m[i] + (1.0 - b1) * g[i];
      v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
      const double mh = m[i] / c1;
      const double vh = v[i] / c2;
      p[i] -= lr * mh / (std::sqrt(vh) + eps);
    }
  }
};

double norm2(std::span<const float> p) {
  double s = 0.0;
  for (float x : p) s += static_cast<double>(x) * x;
  return s;
}

TrainConfig tiny_config() {
  TrainConfig cfg;
  cfg.batch_size = 2;
  cfg.patch = 16;
  cfg.lr = 1e-3;
  cfg.warmup_steps = 2;
  cfg.horizon_steps = 6;
  cfg.max_epochs = 3;
  cfg.seed = 9;
  return cfg;
}

ModelConfig tiny_model() {
  ModelConfig mc;
  mc.arch.base_channels = 8;
  mc.arch.timestep_embed_dim = 8;
  return mc;
}

}  // namespace

TEST_CASE("learning-rate schedule endpoints") {
  TrainConfig cfg;
  CHECK(lr_at(0, cfg) == 0.0);
  CHECK(lr_at(cfg.warmup_steps, cfg) == cfg.lr);
  CHECK(lr_at(cfg.warmup_steps / 2, cfg) == doctest::Approx(cfg.lr / 2));
  CHECK(lr_at(cfg.horizon_steps, cfg) == 0.0);
  CHECK(lr_at(cfg.horizon_steps + 100, cfg) == 0.0);
  const std::int64_t mid = (cfg.warmup_steps + cfg.horizon_steps) / 2;
  CHECK(lr_at(mid, cfg) == doctest::Approx(cfg.lr / 2));
  for (std::int64_t s = cfg.warmup_steps; s < cfg.horizon_steps; ++s) CHECK(lr_at(s + 1, cfg) <= lr_at(s, cfg));
}

TEST_CASE("AdamW matches the reference implementation") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> nd(0.0, 1.0);
  const std::size_t n = 257;
  std::vector<double> p(n), ref;
  for (auto& x : p) x = nd(rng);
  ref = p;
  RefAdamW oracle;
  auto opt = OptimizerState::zeros(n);
  const AdamParams a{0.9, 0.999, 1e-8, 0.01};
  for (int step = 0; step < 50; ++step) {
    std::vector<double> g(n);
    for (auto& x : g) x = nd(rng) * (step % 7 == 3 ? 1e-3 : 1.0);
    const double lr = 1e-3 * (1 + step % 5);
    adamw_update<double>(p, g, opt, lr, a);
    oracle.step(ref, g, lr, a.beta1, a.beta2, a.eps, a.weight_decay);
  }
  CHECK(opt.step == 50);
  for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(p[i] - ref[i]) <= 1e-12);
}

TEST_CASE("AdamW degenerate updates") {
  std::vector<float> p{1.f, -2.f, 0.5f, 3.f};
  const std::vector<float> zero(4, 0.f);
  SUBCASE("zero gradient and zero decay leave parameters bit-identical") {
    auto opt = OptimizerState::zeros(4);
    const auto before = p;
    for (int i = 0; i < 5; ++i) adamw_update<float>(p, zero, opt, 1e-2, {0.9, 0.999, 1e-8, 0.0});
    CHECK(std::memcmp(p.data(), before.data(), sizeof(float) * 4) == 0);
  }
  SUBCASE("lr = 0 leaves parameters unchanged") {
    auto opt = OptimizerState::zeros(4);
    const auto before = p;
    const std::vector<float> g{1.f, 1.f, -1.f, 2.f};
    adamw_update<float>(p, g, opt, 0.0, {});
    CHECK(p == before);
  }
  SUBCASE("decay only shrinks the norm") {
    auto opt = OptimizerState::zeros(4);
    double prev = norm2(p);
    for (int i = 0; i < 3; ++i) {
      adamw_update<float>(p, zero, opt, 1e-1, {0.9, 0.999, 1e-8, 0.1});
      const double now = norm2(p);
      CHECK(now < prev);
      prev = now;
    }
  }
}

TEST_CASE("objective gradient matches central differences") {
  ModelConfig mc;
  mc.arch.base_channels = 4;
  mc.arch.depth = 1;
  mc.arch.timestep_embed_dim = 4;
  UNet<double> net(mc.arch, {}, 10);
  const std::size_t P = net.layout().total();
  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd(0.0, 1.0);
  std::vector<double> params(P);
  for (auto& x : params) x = 0.2 * nd(rng);

  PreparedSample<double> x;
  const int S = 8, n = S * S;
  x.input = Tensor<double>(2, S, S);
  x.s.resize(n);
  x.g.resize(n);
  x.m.assign(n, 1);
  x.m_alpha.resize(n);
  for (int i = 0; i < n; ++i) {
    x.s[i] = nd(rng);
    x.g[i] = x.s[i] - std::abs(nd(rng));
    x.m_alpha[i] = i % 3 == 0;
    x.input.channel(0)[i] = nd(rng);
    x.input.channel(1)[i] = x.s[i];
  }
  x.m[10] = 0;
  x.t = 4;
  for (OutputMode mode : {OutputMode::residual_gated, OutputMode::residual_ungated, OutputMode::absolute_gated}) {
    std::vector<double> grads(P, 0.0);
    objective<double>(net, mode, params.data(), grads.data(), x, {});
    std::uniform_int_distribution<std::size_t> pick(0, P - 1);
    int bad = 0;
    for (int k = 0; k < 60; ++k) {
      const std::size_t j = pick(rng);
      const double h = 1e-5;
      const double keep = params[j];
      params[j] = keep + h;
      const double up = objective<double>(net, mode, params.data(), nullptr, x, {}).total;
      params[j] = keep - h;
      const double dn = objective<double>(net, mode, params.data(), nullptr, x, {}).total;
      params[j] = keep;
      const double fd = (up - dn) / (2 * h);
      if (std::abs(fd - grads[j]) > 1e-4 * std::max(1e-2, std::abs(fd))) ++bad;
    }
    // The L1 and gradient-magnitude terms are piecewise smooth; allow a kink crossing or two.
    CHECK(bad <= 2);
  }
}

TEST_CASE("augmentation properties") {
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<float> u(0.f, 10.f);
  std::vector<float> sv(24 * 24), gv(24 * 24);
  for (std::size_t i = 0; i < sv.size(); ++i) {
    gv[i] = u(gen);
    sv[i] = gv[i] + (i % 5 == 0 ? 3.f : 0.1f);
  }
  const Grid s(24, 24, sv), g(24, 24, gv);
  const Mask m = Mask::filled(24, 24, true);

  SUBCASE("disabled augmentation is the identity") {
    std::mt19937_64 rng(1);
    const auto a = augment(s, g, m, AugmentConfig::disabled(24), rng);
    CHECK(std::memcmp(a.s.values().data(), s.values().data(), s.size() * 4) == 0);
    CHECK(std::memcmp(a.g.values().data(), g.values().data(), g.size() * 4) == 0);
    CHECK(a.m == m);
  }
  SUBCASE("half turn twice is the identity") {
    const Grid twice = rot90(rot90(s, 2), 2);
    CHECK(std::memcmp(twice.values().data(), s.values().data(), s.size() * 4) == 0);
  }
  SUBCASE("ground mask commutes with a quarter turn") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      std::mt19937_64 r(seed);
      std::vector<float> a(256), b(256);
      for (int i = 0; i < 256; ++i) {
        a[i] = u(r);
        b[i] = a[i] - (i % 3 ? 0.f : u(r));
      }
      const Grid ga(16, 16, a), gb(16, 16, b);
      CHECK(rot90(ground_mask(ga, gb, 0.25), 1) == ground_mask(rot90(ga, 1), rot90(gb, 1), 0.25));
    }
  }
  SUBCASE("identical transform on s, g and m; no value invention") {
    const auto [mn, mx] = std::minmax_element(sv.begin(), sv.end());
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
      std::mt19937_64 r1(seed), r2(seed);
      AugmentConfig cfg;
      cfg.patch = 16;
      cfg.p_jitter = 1.0;
      const auto a = augment(s, s, m, cfg, r1);
      CHECK(a.s.width() == 16);
      CHECK(a.s.height() == 16);
      CHECK(std::memcmp(a.s.values().data(), a.g.values().data(), a.s.size() * 4) == 0);
      for (std::size_t i = 0; i < a.s.size(); ++i) {
        if (a.m[i]) CHECK(std::isfinite(a.s[i]));
        if (a.m[i]) {
          CHECK(a.s[i] >= *mn - 1e-4f);
          CHECK(a.s[i] <= *mx + 1e-4f);
        }
      }
      const auto b = augment(s, s, m, cfg, r2);
      CHECK(a.m == b.m);
    }
  }
}

TEST_CASE("train step: lr 0 keeps parameters, loss is reported") {
  auto corpus = synthetic_corpus(2, 3, 32);
  auto model = DenoiserModel::create(tiny_model(), 1);
  TrainConfig cfg = tiny_config();
  cfg.patch = 32;
  cfg.lr = 0.0;
  const auto before = model.parameters;
  auto opt = OptimizerState::zeros(model.parameter_count());
  std::mt19937_64 rng(1);
  const Example* batch[] = {&corpus[0], &corpus[1]};
  const auto loss = train_step(model, batch, model.config.make_schedule(), cfg, opt, rng);
  CHECK(loss.total > 0.0);
  CHECK(model.parameters == before);
}

TEST_CASE("train step: divergence leaves the model untouched") {
  auto corpus = synthetic_corpus(1, 3, 32);
  auto model = DenoiserModel::create(tiny_model(), 1);
  model.parameters[model.parameters.size() - 1] = std::numeric_limits<float>::quiet_NaN();
  const auto before = model.parameters;
  TrainConfig cfg = tiny_config();
  cfg.patch = 32;
  auto opt = OptimizerState::zeros(model.parameter_count());
  std::mt19937_64 rng(1);
  const Example* batch[] = {&corpus[0]};
  try {
    train_step(model, batch, model.config.make_schedule(), cfg, opt, rng);
    FAIL("expected divergence");
  } catch (const DivergenceError& e) {
    CHECK(std::string(e.what()) == "divergence");
  }
  CHECK(std::memcmp(model.parameters.data(), before.data(), before.size() * 4) == 0);
  CHECK(opt.step == 0);
}

TEST_CASE("overfitting one batch lowers the loss") {
  const auto corpus = synthetic_corpus(4, 21, 32);
  const ModelConfig mc;
  auto model = DenoiserModel::create(mc, 2);
  TrainConfig cfg;  // default optimizer settings
  cfg.patch = 32;
  const auto sched = mc.make_schedule();

  // Fixed probe: the same prepared samples before and after training.
  auto probe = [&](const DenoiserModel& mdl) {
    double total = 0.0;
    UNet<float> net(mdl.config.arch, {}, mdl.config.diffusion_steps);
    for (int rep = 0; rep < 4; ++rep)
      for (const auto& ex : corpus) {
        std::mt19937_64 r(1000 + rep);
        const auto x = prepare_sample(ex, mdl.config, sched, cfg, r);
        total += objective<float>(net, mdl.config.output, mdl.parameters.data(), nullptr, x, cfg.loss).total;
      }
    return total;
  };
  const double start = probe(model);
  std::vector<const Example*> batch;
  for (const auto& ex : corpus) batch.push_back(&ex);
  auto opt = OptimizerState::zeros(model.parameter_count());
  std::mt19937_64 rng(4);
  for (int step = 0; step < 200; ++step) train_step(model, batch, sched, cfg, opt, rng);
  const double end = probe(model);
  MESSAGE("probe loss " << start << " -> " << end);
  CHECK(end < start);
}

TEST_CASE("fit: patience 0, determinism, empty sets") {
  const auto train = synthetic_corpus(4, 5, 16);
  const auto val = synthetic_corpus(1, 6, 16);
  const auto model = DenoiserModel::create(tiny_model(), 3);
  TrainConfig cfg = tiny_config();
  cfg.val_every = 1;
  cfg.early_stop_patience = 0;
  const auto r = fit(model, train, val, cfg);
  CHECK(r.early_stopped);
  CHECK(r.validation.size() == 1);
  CHECK(r.steps == 1);

  cfg.early_stop_patience = 100;
  cfg.val_every = 0;
  const auto a = fit(model, train, val, cfg);
  const auto b = fit(model, train, val, cfg);
  CHECK(a.steps == cfg.horizon_steps);
  CHECK(train_log_csv(a.log) == train_log_csv(b.log));
  CHECK(validation_csv(a.validation) == validation_csv(b.validation));
  CHECK(a.best.parameters == b.best.parameters);
  CHECK(train_log_csv(a.log).rfind("step,l1,l2,lgrad,lc,total,lr\n", 0) == 0);

  CHECK_THROWS_AS(fit(model, {}, val, cfg), InputError);
  CHECK_THROWS_AS(fit(model, train, {}, cfg), InputError);
}

TEST_CASE("training is independent of the worker count") {
  const auto train = synthetic_corpus(4, 5, 16);
  const auto model = DenoiserModel::create(tiny_model(), 3);
  TrainConfig cfg = tiny_config();
  auto run = [&](const char* threads) {
    setenv("TERRAINDIFF_THREADS", threads, 1);
    auto m = model;
    auto opt = OptimizerState::zeros(m.parameter_count());
    std::mt19937_64 rng(8);
    std::vector<const Example*> batch{&train[0], &train[1], &train[2], &train[3]};
    for (int i = 0; i < 3; ++i) train_step(m, batch, m.config.make_schedule(), cfg, opt, rng);
    return m.parameters;
  };
  const auto one = run("1");
  const auto four = run("4");
  unsetenv("TERRAINDIFF_THREADS");
  CHECK(std::memcmp(one.data(), four.data(), one.size() * 4) == 0);
}

TEST_CASE("identity baseline equals direct RMSE") {
  const auto set = synthetic_corpus(3, 8, 32);
  double se = 0.0;
  std::size_t n = 0;
  for (const auto& ex : set)
    for (std::size_t i = 0; i < ex.dsm.size(); ++i) {
      const double d = ex.dsm[i] - ex.dtm[i];
      se += d * d;
      ++n;
    }
  CHECK(identity_baseline(set).rmse == doctest::Approx(std::sqrt(se / n)).epsilon(1e-9));
}

TEST_CASE("config validation") {
  TrainConfig cfg;
  cfg.patch = 30;
  CHECK_THROWS_AS(cfg.validate(ArchSpec{}), InputError);
  cfg.patch = 32;
  cfg.lr = -1;
  CHECK_THROWS_AS(cfg.validate(ArchSpec{}), InputError);
}
