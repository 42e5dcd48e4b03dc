#include "terraindiff/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "terraindiff/errors.hpp"

namespace terraindiff {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const double d = std::strtod(v.c_str(), &end);
  if (v.empty() || *end != '\0' || !std::isfinite(d)) throw InputError("bad value for " + key + ": " + v);
  return d;
}

long long to_int(const std::string& key, const std::string& v) {
  long long x = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
  if (v.empty() || r.ec != std::errc() || r.ptr != v.data() + v.size()) throw InputError("bad value for " + key + ": " + v);
  return x;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::uint64_t x = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
  if (v.empty() || r.ec != std::errc() || r.ptr != v.data() + v.size()) throw InputError("bad value for " + key + ": " + v);
  return x;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw InputError("bad value for " + key + ": " + v);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Key {
  std::function<void(RunConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define TD_INT(name, field) \
  {name, {[](RunConfig& c, const std::string& k, const std::string& v) { c.field = static_cast<int>(to_int(k, v)); }, \
          [](const RunConfig& c) { return std::to_string(c.field); }}}
#define TD_DOUBLE(name, field) \
  {name, {[](RunConfig& c, const std::string& k, const std::string& v) { c.field = to_double(k, v); }, \
          [](const RunConfig& c) { return fmt(c.field); }}}
#define TD_BOOL(name, field) \
  {name, {[](RunConfig& c, const std::string& k, const std::string& v) { c.field = to_bool(k, v); }, \
          [](const RunConfig& c) { return std::string(c.field ? "true" : "false"); }}}
#define TD_ENUM(name, field, parse) \
  {name, {[](RunConfig& c, const std::string&, const std::string& v) { c.field = parse(v); }, \
          [](const RunConfig& c) { return to_string(c.field); }}}

const std::map<std::string, Key>& keys() {
  static const std::map<std::string, Key> k = {
      TD_DOUBLE("lr", train.lr),
      TD_DOUBLE("weight_decay", train.weight_decay),
      TD_INT("warmup_steps", train.warmup_steps),
      TD_INT("max_epochs", train.max_epochs),
      TD_INT("batch_size", train.batch_size),
      TD_INT("patch", train.patch),
      TD_DOUBLE("alpha", train.alpha),
      {"seed", {[](RunConfig& c, const std::string& k, const std::string& v) { c.train.seed = to_u64(k, v); },
                [](const RunConfig& c) { return std::to_string(c.train.seed); }}},
      TD_INT("early_stop_patience", train.early_stop_patience),
      TD_INT("horizon_steps", train.horizon_steps),
      TD_INT("val_every", train.val_every),
      TD_BOOL("augment", train.augment),
      TD_DOUBLE("lambda1", train.loss.lambda1),
      TD_DOUBLE("lambda2", train.loss.lambda2),
      TD_DOUBLE("lambda_grad", train.loss.lambda_grad),
      TD_DOUBLE("lambda_c", train.loss.lambda_c),
      TD_INT("T", model.diffusion_steps),
      TD_ENUM("schedule", model.schedule, parse_schedule_kind),
      TD_DOUBLE("beta_min", model.beta_min),
      TD_DOUBLE("beta_max", model.beta_max),
      TD_INT("base_channels", model.arch.base_channels),
      TD_INT("depth", model.arch.depth),
      TD_INT("resblocks_per_stage", model.arch.resblocks_per_stage),
      TD_BOOL("attention", model.arch.use_bottleneck_attention),
      TD_INT("embed_dim", model.arch.timestep_embed_dim),
      TD_ENUM("output", model.output, parse_output_mode),
      TD_ENUM("norm", model.norm, parse_norm_kind),
      TD_BOOL("single_pass", model.single_pass),
      TD_INT("train_scenes", train_scenes),
      TD_INT("val_scenes", val_scenes),
      TD_INT("scene_size", scene_size),
      TD_DOUBLE("pixel_size", pixel_size),
      TD_INT("tile", tile),
      TD_INT("stride", stride),
      TD_ENUM("blend", blend, parse_blend_mode),
      TD_BOOL("prior", use_prior),
      TD_ENUM("init", init, parse_init_kind),
      TD_INT("reverse_steps", reverse_steps),
  };
  return k;
}

#undef TD_INT
#undef TD_DOUBLE
#undef TD_BOOL
#undef TD_ENUM

}  // namespace

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value) {
  const auto it = keys().find(key);
  if (it == keys().end()) throw InputError("unknown config key: " + key);
  it->second.set(cfg, key, value);
}

void parse_config(RunConfig& cfg, const std::string& text, std::vector<std::string>* warnings) {
  std::istringstream in(text);
  std::string line;
  std::map<std::string, int> seen;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw InputError("config line " + std::to_string(number) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw InputError("config line " + std::to_string(number) + ": empty key");
    try {
      apply_setting(cfg, key, value);
    } catch (const InputError& e) {
      throw InputError("config line " + std::to_string(number) + ": " + e.what());
    }
    if (const auto prev = seen.find(key); prev != seen.end() && warnings)
      warnings->push_back("config line " + std::to_string(number) + ": duplicate key '" + key + "' overrides line " +
                          std::to_string(prev->second));
    seen[key] = number;
  }
}

RunConfig load_config(const std::filesystem::path& path, std::vector<std::string>* warnings) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw FileError("cannot open config: " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  RunConfig cfg;
  parse_config(cfg, ss.str(), warnings);
  return cfg;
}

void apply_environment(RunConfig& cfg) {
  if (const char* s = std::getenv("TERRAINDIFF_SEED"); s && *s) {
    try {
      cfg.train.seed = to_u64("TERRAINDIFF_SEED", s);
    } catch (const InputError& e) {
      throw InputError(std::string("environment: ") + e.what());
    }
  }
}

std::string to_text(const RunConfig& cfg) {
  std::string out;
  for (const auto& [name, key] : keys()) out += name + "=" + key.get(cfg) + "\n";
  return out;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const auto& kv : keys()) out.push_back(kv.first);
  return out;
}

}  // namespace terraindiff
