#include "terraindiff/schedule.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "terraindiff/errors.hpp"

namespace terraindiff {

ScheduleKind parse_schedule_kind(const std::string& name) {
  if (name == "cosine" || name == "cosine_beta") return ScheduleKind::cosine_beta;
  if (name == "cosine_alpha_bar") return ScheduleKind::cosine_alpha_bar;
  throw InputError("unknown schedule kind: " + name);
}

std::string to_string(ScheduleKind kind) {
  return kind == ScheduleKind::cosine_beta ? "cosine_beta" : "cosine_alpha_bar";
}

double DiffusionSchedule::sqrt_alpha_bar(int t) const { return std::sqrt(alpha_bar.at(t)); }
double DiffusionSchedule::sqrt_one_minus_alpha_bar(int t) const { return std::sqrt(1.0 - alpha_bar.at(t)); }

DiffusionSchedule schedule_from_betas(const std::vector<double>& betas) {
  if (betas.empty()) throw InputError("schedule needs at least one step");
  DiffusionSchedule s;
  s.steps = static_cast<int>(betas.size());
  s.beta.assign(betas.size() + 1, 0.0);
  s.alpha.assign(betas.size() + 1, 0.0);
  s.alpha_bar.assign(betas.size() + 1, 1.0);
  for (int t = 1; t <= s.steps; ++t) {
    const double b = betas[t - 1];
    if (!(b > 0.0 && b < 1.0)) throw InputError("beta must lie in (0, 1)");
    s.beta[t] = b;
    s.alpha[t] = 1.0 - b;
    s.alpha_bar[t] = s.alpha_bar[t - 1] * s.alpha[t];
  }
  return s;
}

DiffusionSchedule make_cosine_schedule(int steps, double beta_min, double beta_max) {
  if (steps < 1) throw InputError("T must be >= 1");
  if (!(beta_min > 0.0 && beta_min <= beta_max && beta_max < 1.0)) throw InputError("invalid beta bounds");
  std::vector<double> betas(steps);
  for (int t = 1; t <= steps; ++t) {
    const double ease = 0.5 * (1.0 - std::cos(std::numbers::pi * t / steps));
    betas[t - 1] = beta_min + (beta_max - beta_min) * ease;
  }
  if (steps == 1 || beta_min == beta_max) {
    // The ease is exactly 1 at t = T but cos(pi) rounding can leave an ulp; pin the endpoints.
    betas[steps - 1] = beta_max;
  }
  return schedule_from_betas(betas);
}

DiffusionSchedule make_alpha_bar_cosine_schedule(int steps, double offset) {
  if (steps < 1) throw InputError("T must be >= 1");
  const auto f = [&](double t) {
    const double c = std::cos((t / steps + offset) / (1.0 + offset) * 0.5 * std::numbers::pi);
    return c * c;
  };
  std::vector<double> betas(steps);
  for (int t = 1; t <= steps; ++t) betas[t - 1] = std::min(1.0 - f(t) / f(t - 1), 0.999);
  return schedule_from_betas(betas);
}

DiffusionSchedule make_schedule(ScheduleKind kind, int steps, double beta_min, double beta_max) {
  return kind == ScheduleKind::cosine_beta ? make_cosine_schedule(steps, beta_min, beta_max)
                                           : make_alpha_bar_cosine_schedule(steps);
}

Grid forward_sample(const DiffusionSchedule& sched, const Grid& g0, int t, const Grid& eps) {
  if (t < 1 || t > sched.steps) throw InputError("timestep out of range");
  if (!g0.same_shape(eps)) throw InputError("noise shape mismatch");
  const double a = sched.sqrt_alpha_bar(t);
  const double b = sched.sqrt_one_minus_alpha_bar(t);
  std::vector<float> out(g0.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<float>(a * g0[i] + b * eps[i]);
  return g0.with_values(std::move(out));
}

PosteriorCoefficients posterior_coefficients(double beta, double alpha_bar, double alpha_bar_prev) {
  const double denom = 1.0 - alpha_bar;
  if (beta <= 0.0) return {0.0, 1.0, 0.0};
  // Last step: the mean is the prediction itself. Avoids rounding in beta / (1 - (1 - beta)).
  if (alpha_bar_prev == 1.0) return {1.0, 0.0, 0.0};
  return {beta * std::sqrt(alpha_bar_prev) / denom, (1.0 - alpha_bar_prev) * std::sqrt(1.0 - beta) / denom,
          beta * (1.0 - alpha_bar_prev) / denom};
}

PosteriorCoefficients posterior_coefficients(const DiffusionSchedule& sched, int t) {
  if (t < 1 || t > sched.steps) throw InputError("timestep out of range");
  return posterior_coefficients(sched.beta[t], sched.alpha_bar[t], sched.alpha_bar[t - 1]);
}

std::vector<ReverseStep> plan_reverse_steps(const DiffusionSchedule& sched, int reverse_steps) {
  if (reverse_steps < 1) throw InputError("reverse steps must be >= 1");
  const int T = sched.steps;
  std::vector<int> idx(reverse_steps + 1);
  for (int k = 0; k <= reverse_steps; ++k)
    idx[k] = static_cast<int>((static_cast<long long>(k) * T + reverse_steps - 1) / reverse_steps);
  std::vector<ReverseStep> plan;
  for (int k = reverse_steps; k >= 1; --k) {
    const int t = idx[k];
    const int prev = idx[k - 1];
    ReverseStep step{t, 0.0, sched.alpha_bar[t], sched.alpha_bar[prev]};
    if (prev == t - 1)
      step.beta = sched.beta[t];
    else if (prev < t)
      step.beta = 1.0 - sched.alpha_bar[t] / sched.alpha_bar[prev];
    plan.push_back(step);
  }
  return plan;
}

std::string schedule_csv(const DiffusionSchedule& sched) {
  std::ostringstream os;
  os.precision(17);
  os << "t,beta,alpha,alpha_bar\n";
  os << 0 << ",,," << sched.alpha_bar[0] << "\n";
  for (int t = 1; t <= sched.steps; ++t)
    os << t << ',' << sched.beta[t] << ',' << sched.alpha[t] << ',' << sched.alpha_bar[t] << "\n";
  return os.str();
}

}  // namespace terraindiff
