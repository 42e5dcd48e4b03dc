#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "terraindiff/denoiser.hpp"
#include "terraindiff/priostitch.hpp"
#include "terraindiff/sampler.hpp"
#include "terraindiff/trainer.hpp"

namespace terraindiff {

// Everything a run can be configured with. Grammar: one `key = value` per line, `#` starts a
// comment, blank lines ignored, keys are case-sensitive, the last duplicate wins.
struct RunConfig {
  ModelConfig model;
  TrainConfig train;
  int train_scenes = 200;
  int val_scenes = 40;
  int scene_size = 64;
  double pixel_size = 1.0;
  int tile = 64;
  int stride = 32;
  BlendMode blend = BlendMode::min;
  bool use_prior = true;
  InitKind init = InitKind::noisy_dsm;
  int reverse_steps = 0;  // 0 = trained T
};

// Sets one key. Unknown keys and unparsable values raise InputError.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);

// Parses config text on top of `cfg`. Duplicate keys append a warning.
void parse_config(RunConfig& cfg, const std::string& text, std::vector<std::string>* warnings = nullptr);

RunConfig load_config(const std::filesystem::path& path, std::vector<std::string>* warnings = nullptr);

// TERRAINDIFF_SEED, when set, replaces the seed.
void apply_environment(RunConfig& cfg);

// Canonical key=value snapshot; parse_config(to_text(c)) reproduces c.
std::string to_text(const RunConfig& cfg);

std::vector<std::string> config_keys();

}  // namespace terraindiff
