#pragma once

#include <string>
#include <vector>

#include "terraindiff/grid.hpp"

namespace terraindiff {

enum class ScheduleKind {
  cosine_beta,       // beta eased along half a cosine between beta_min and beta_max
  cosine_alpha_bar,  // alpha_bar follows the squared-cosine curve with offset 0.008
};

ScheduleKind parse_schedule_kind(const std::string& name);
std::string to_string(ScheduleKind kind);

// Tables are indexed by step: beta[t], alpha[t] for t in [1, T] (index 0 unused, zero),
// alpha_bar[t] for t in [0, T] with alpha_bar[0] == 1.
struct DiffusionSchedule {
  int steps = 0;
  std::vector<double> beta;
  std::vector<double> alpha;
  std::vector<double> alpha_bar;

  double sqrt_alpha_bar(int t) const;
  double sqrt_one_minus_alpha_bar(int t) const;
};

DiffusionSchedule make_cosine_schedule(int steps, double beta_min = 1e-4, double beta_max = 0.02);
DiffusionSchedule make_alpha_bar_cosine_schedule(int steps, double offset = 0.008);
DiffusionSchedule make_schedule(ScheduleKind kind, int steps, double beta_min = 1e-4, double beta_max = 0.02);

// Schedule from explicit betas (beta[0] is step 1).
DiffusionSchedule schedule_from_betas(const std::vector<double>& betas);

// g_t = sqrt(alpha_bar_t) * g0 + sqrt(1 - alpha_bar_t) * eps. Nodata propagates.
Grid forward_sample(const DiffusionSchedule& sched, const Grid& g0, int t, const Grid& eps);

// Coefficients of the reverse step: mean = c_pred * g_hat + c_state * g_t, variance = var.
struct PosteriorCoefficients {
  double c_pred = 0.0;
  double c_state = 0.0;
  double var = 0.0;
};

PosteriorCoefficients posterior_coefficients(double beta, double alpha_bar, double alpha_bar_prev);
PosteriorCoefficients posterior_coefficients(const DiffusionSchedule& sched, int t);

// One reverse step on the trained schedule: model index t, with the transition from
// alpha_bar_prev to alpha_bar. Consecutive indices use the stored beta.
struct ReverseStep {
  int t = 0;
  double beta = 0.0;
  double alpha_bar = 1.0;
  double alpha_bar_prev = 1.0;
};

// Plan of `reverse_steps` steps over the trained schedule by uniform stride with ceil
// spacing. Repeated indices (reverse_steps > T) become zero-variance identity transitions.
std::vector<ReverseStep> plan_reverse_steps(const DiffusionSchedule& sched, int reverse_steps);

std::string schedule_csv(const DiffusionSchedule& sched);

}  // namespace terraindiff
