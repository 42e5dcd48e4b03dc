#include "terraindiff/sampler.hpp"

#include <cmath>
#include <limits>

#include "terraindiff/errors.hpp"
#include "terraindiff/resample.hpp"

namespace terraindiff {

InitKind parse_init_kind(const std::string& s) {
  if (s == "noise" || s == "gaussian_noise") return InitKind::gaussian_noise;
  if (s == "dsm") return InitKind::dsm;
  if (s == "noisy-dsm" || s == "noisy_dsm") return InitKind::noisy_dsm;
  if (s == "prior" || s == "prior_dtm") return InitKind::prior_dtm;
  throw InputError("unknown init mode: " + s);
}

std::string to_string(InitKind k) {
  switch (k) {
    case InitKind::gaussian_noise: return "noise";
    case InitKind::dsm: return "dsm";
    case InitKind::noisy_dsm: return "noisy-dsm";
    case InitKind::prior_dtm: return "prior";
  }
  return "?";
}

Grid standard_normal(const Grid& like, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<float> v(like.size());
  for (auto& x : v) x = static_cast<float>(n(rng));
  return like.with_values(std::move(v));
}

Grid init_state(const InitMode& mode, const Grid& s, std::mt19937_64& rng) {
  switch (mode.kind) {
    case InitKind::gaussian_noise: return standard_normal(s, rng);
    case InitKind::dsm: return s;
    case InitKind::noisy_dsm: {
      const Grid eps = standard_normal(s, rng);
      std::vector<float> v(s.size());
      for (std::size_t i = 0; i < v.size(); ++i) v[i] = s[i] + eps[i];
      return s.with_values(std::move(v));
    }
    case InitKind::prior_dtm:
      if (!mode.prior) throw InputError("prior init requires a prior grid");
      if (!mode.prior->same_shape(s)) throw InputError("prior shape mismatch");
      return *mode.prior;
  }
  throw InputError("unknown init mode");
}

StepOutput reverse_step(const ReverseStep& step, const Denoiser& den, const Grid& g_t, const Grid& s, const Grid& eps,
                        const Window& where) {
  const PosteriorCoefficients c = posterior_coefficients(step.beta, step.alpha_bar, step.alpha_bar_prev);
  if (step.beta <= 0.0) return {g_t, {}, {}};
  GatedOutput pred = den.predict(g_t, s, step.t, where);
  const double sigma = std::sqrt(c.var);
  std::vector<float> v(g_t.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    double x = c.c_pred * pred.g0_hat[i] + c.c_state * g_t[i];
    if (sigma > 0.0) x += sigma * eps[i];
    v[i] = static_cast<float>(x);
  }
  return {g_t.with_values(std::move(v)), std::move(pred.g0_hat), std::move(pred.logits)};
}

Grid posterior_step(const DiffusionSchedule& sched, const Denoiser& den, const Grid& g_t, const Grid& s, int t,
                    const Grid& eps, const Window& where) {
  if (t < 1 || t > sched.steps) throw InputError("timestep out of range");
  if (!g_t.same_shape(s) || !eps.same_shape(s)) throw InputError("posterior operand shape mismatch");
  const ReverseStep step{t, sched.beta[t], sched.alpha_bar[t], sched.alpha_bar[t - 1]};
  return reverse_step(step, den, g_t, s, eps, where).g_prev;
}

NormalizedSample sample_normalized(const DiffusionSchedule& sched, const Denoiser& den, const Grid& s,
                                   const Grid& init, int reverse_steps, std::mt19937_64& rng, const Window& where) {
  if (den.single_pass()) {
    GatedOutput out = den.predict(s, s, sched.steps, where);
    return {std::move(out.g0_hat), std::move(out.logits)};
  }
  if (reverse_steps == 0) reverse_steps = sched.steps;
  const auto plan = plan_reverse_steps(sched, reverse_steps);
  Grid g = init;
  Grid logits;
  for (const ReverseStep& step : plan) {
    if (step.beta <= 0.0) continue;
    const PosteriorCoefficients c = posterior_coefficients(step.beta, step.alpha_bar, step.alpha_bar_prev);
    const Grid eps = c.var > 0.0 ? standard_normal(s, rng) : Grid::filled(s.width(), s.height(), 0.f, s.geo());
    StepOutput out = reverse_step(step, den, g, s, eps, where);
    g = std::move(out.g_prev);
    logits = std::move(out.logits);
  }
  return {std::move(g), std::move(logits)};
}

SampleResult sample(const DiffusionSchedule& sched, const Denoiser& den, const Grid& s, const InitMode& mode,
                    int reverse_steps, std::mt19937_64& rng, std::optional<Window> region) {
  const Mask valid = s.validity();
  const AffineMap map = den.inference_map(s, valid);
  const Grid sn = apply_affine(s, map, valid);
  InitMode normalized_mode = mode;
  if (mode.kind == InitKind::prior_dtm) {
    if (!mode.prior) throw InputError("prior init requires a prior grid");
    if (!mode.prior->same_shape(s)) throw InputError("prior shape mismatch");
    normalized_mode.prior = apply_affine(*mode.prior, map, mode.prior->validity());
  }
  Window where = region.value_or(Window{map, 0, 0, s.height(), s.width()});
  where.norm = map;
  const Grid init = init_state(normalized_mode, sn, rng);
  const NormalizedSample out = sample_normalized(sched, den, sn, init, reverse_steps, rng, where);

  constexpr float nan = std::numeric_limits<float>::quiet_NaN();
  std::vector<float> dtm(s.size()), prob(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!valid[i]) {
      dtm[i] = prob[i] = nan;
      continue;
    }
    dtm[i] = static_cast<float>(map.invert(out.g0[i]));
    const double l = out.logits[i];
    prob[i] = static_cast<float>(l >= 0 ? 1.0 / (1.0 + std::exp(-l)) : std::exp(l) / (1.0 + std::exp(l)));
  }
  return {s.with_values(std::move(dtm)), s.with_values(std::move(prob))};
}

GatedOutput OracleDenoiser::predict(const Grid& g_t, const Grid& s, int t, const Window& where) const {
  if (t < 1 || t > steps_) throw InputError("timestep out of range");
  Grid truth = truth_;
  if (where.rows > 0 && where.cols > 0 && (where.rows != truth_.height() || where.cols != truth_.width()))
    truth = truth_.crop(where.row0, where.col0, where.rows, where.cols);
  if (!truth.same_shape(g_t)) truth = resize_bilinear(truth, g_t.width(), g_t.height());
  std::vector<float> g(truth.size()), l(truth.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    g[i] = static_cast<float>(where.norm.apply(truth[i]));
    const double s_m = where.norm.invert(s[i]);
    l[i] = std::abs(s_m - truth[i]) < alpha_ ? 10.f : -10.f;
  }
  return {s.with_values(std::move(g)), s.with_values(std::move(l))};
}

}  // namespace terraindiff
