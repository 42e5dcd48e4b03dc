#pragma once

#include <optional>
#include <random>
#include <string>

#include "terraindiff/denoiser.hpp"
#include "terraindiff/grid.hpp"
#include "terraindiff/schedule.hpp"

namespace terraindiff {

enum class InitKind { gaussian_noise, dsm, noisy_dsm, prior_dtm };

InitKind parse_init_kind(const std::string& s);
std::string to_string(InitKind k);

struct InitMode {
  InitKind kind = InitKind::noisy_dsm;
  std::optional<Grid> prior;  // required for prior_dtm; same units as the DSM it accompanies
  static InitMode of(InitKind k) { return {k, std::nullopt}; }
  static InitMode from_prior(Grid prior) { return {InitKind::prior_dtm, std::move(prior)}; }
};

// Standard normal field shaped like `like`.
Grid standard_normal(const Grid& like, std::mt19937_64& rng);

// Initial reverse-process state for a normalized DSM. prior_dtm returns the (normalized) prior as is.
Grid init_state(const InitMode& mode, const Grid& s, std::mt19937_64& rng);

struct StepOutput {
  Grid g_prev;
  Grid g0_hat;
  Grid logits;
};

// One reverse step on normalized grids. Identity transitions (beta = 0) skip the denoiser and
// return empty g0_hat/logits.
StepOutput reverse_step(const ReverseStep& step, const Denoiser& den, const Grid& g_t, const Grid& s, const Grid& eps,
                        const Window& where);

// Posterior step at trained index t (1 <= t <= T) with explicit noise.
Grid posterior_step(const DiffusionSchedule& sched, const Denoiser& den, const Grid& g_t, const Grid& s, int t,
                    const Grid& eps, const Window& where = {});

struct NormalizedSample {
  Grid g0;
  Grid logits;
};

// Full reverse loop on a normalized DSM. reverse_steps = 0 means the trained T.
NormalizedSample sample_normalized(const DiffusionSchedule& sched, const Denoiser& den, const Grid& s,
                                   const Grid& init, int reverse_steps, std::mt19937_64& rng, const Window& where);

struct SampleResult {
  Grid dtm;          // meters, nodata where the DSM is nodata
  Grid ground_prob;  // sigmoid of the final logits
};

// DSM in meters in, DTM in meters out. Normalization comes from the denoiser.
// `region` describes where s sits inside a larger raster (tile inference); its norm field is
// overwritten with the map actually used.
SampleResult sample(const DiffusionSchedule& sched, const Denoiser& den, const Grid& s, const InitMode& mode,
                    int reverse_steps, std::mt19937_64& rng, std::optional<Window> region = std::nullopt);

// Denoiser that always answers with the ground truth, resampled to the requested window.
// Logits are +-10 depending on whether the DSM is within alpha of the truth.
class OracleDenoiser : public Denoiser {
 public:
  OracleDenoiser(Grid truth, int steps, double alpha = 0.25) : truth_(std::move(truth)), steps_(steps), alpha_(alpha) {}
  int steps() const override { return steps_; }
  GatedOutput predict(const Grid& g_t, const Grid& s, int t, const Window& where) const override;

 private:
  Grid truth_;
  int steps_;
  double alpha_;
};

}  // namespace terraindiff
