#include "run_config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>

#include "skelgait/dataset_io.hpp"
#include "skelgait/errors.hpp"
#include "skelgait/rng.hpp"

namespace skelgait::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* want) {
  throw ConfigError("config key '" + key + "': expected " + want + ", got '" + value + "'");
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size() || v.empty()) {
    bad_value(key, v, "a non-negative integer");
  }
  return out;
}

std::size_t to_size(const std::string& key, const std::string& v) {
  return static_cast<std::size_t>(to_u64(key, v));
}

int to_int(const std::string& key, const std::string& v) {
  int out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size() || v.empty()) bad_value(key, v, "an integer");
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size() || v.empty() || !std::isfinite(out)) {
    bad_value(key, v, "a finite number");
  }
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  bad_value(key, v, "true or false");
}

std::vector<std::size_t> to_size_list(const std::string& key, const std::string& v) {
  std::vector<std::size_t> out;
  std::size_t start = 0;
  while (start <= v.size()) {
    const auto comma = v.find(',', start);
    const std::string item = trim(v.substr(start, comma == std::string::npos ? std::string::npos
                                                                              : comma - start));
    out.push_back(to_size(key, item));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string str(double v) { return format_double(v); }
std::string str(std::size_t v) { return std::to_string(v); }
std::string str(bool v) { return v ? "true" : "false"; }

struct Key {
  const char* name;
  std::function<void(RunConfig&, const std::string& key, const std::string& value)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define SIZE_KEY(name, field) \
  Key{name, [](RunConfig& c, const std::string& k, const std::string& v) { c.field = to_size(k, v); }, \
      [](const RunConfig& c) { return str(static_cast<std::size_t>(c.field)); }}
#define DOUBLE_KEY(name, field) \
  Key{name, [](RunConfig& c, const std::string& k, const std::string& v) { c.field = to_double(k, v); }, \
      [](const RunConfig& c) { return str(c.field); }}
#define BOOL_KEY(name, field) \
  Key{name, [](RunConfig& c, const std::string& k, const std::string& v) { c.field = to_bool(k, v); }, \
      [](const RunConfig& c) { return str(c.field); }}

const std::vector<Key>& keys() {
  static const std::vector<Key> table = {
      Key{"seed", [](RunConfig& c, const std::string& k, const std::string& v) { c.seed = to_u64(k, v); },
          [](const RunConfig& c) { return std::to_string(c.seed); }},

      SIZE_KEY("preprocess.target_frames", preprocess.target_frames),
      BOOL_KEY("preprocess.rotate", preprocess.apply_rotation),
      BOOL_KEY("preprocess.center", preprocess.center_spine),
      BOOL_KEY("preprocess.augment", augment),
      DOUBLE_KEY("preprocess.epsilon", preprocess.epsilon),
      DOUBLE_KEY("preprocess.jitter_sigma", preprocess.jitter_sigma),
      DOUBLE_KEY("preprocess.scale_min", preprocess.scale_min),
      DOUBLE_KEY("preprocess.scale_max", preprocess.scale_max),
      DOUBLE_KEY("preprocess.translate_offset", preprocess.translate_offset),
      DOUBLE_KEY("preprocess.slice_fraction", preprocess.slice_fraction),

      Key{"network.k_max",
          [](RunConfig& c, const std::string& k, const std::string& v) { c.network.k_max = to_int(k, v); },
          [](const RunConfig& c) { return std::to_string(c.network.k_max); }},
      Key{"network.channels",
          [](RunConfig& c, const std::string& k, const std::string& v) {
            c.network.channels = to_size_list(k, v);
          },
          [](const RunConfig& c) {
            std::string out;
            for (std::size_t i = 0; i < c.network.channels.size(); ++i) {
              out += (i ? "," : "") + std::to_string(c.network.channels[i]);
            }
            return out;
          }},
      SIZE_KEY("network.tcn_window", network.tcn_window),
      DOUBLE_KEY("network.learning_rate", network.learning_rate),
      SIZE_KEY("network.epochs", network.epochs),
      SIZE_KEY("network.batch_size", network.batch_size),
      DOUBLE_KEY("network.lambda", network.lambda_distance),
      BOOL_KEY("network.angle_embedding", network.angle_embedding),
      BOOL_KEY("network.co_learning", co_learning),

      SIZE_KEY("skepxel.orderings", skepxel.image.orderings),
      SIZE_KEY("skepxel.frames", skepxel.image.frames),
      SIZE_KEY("skepxel.patch_size", skepxel.patch_size),
      SIZE_KEY("skepxel.embed_dim", skepxel.embed_dim),

      DOUBLE_KEY("svr.epsilon", svr.epsilon),
      DOUBLE_KEY("svr.C", svr.C),
      SIZE_KEY("svr.epochs", svr.epochs),
      DOUBLE_KEY("svr.learning_rate", svr.learning_rate),

      SIZE_KEY("assess.clip_frames", clips.clip_frames),
      SIZE_KEY("assess.n_clips", clips.n_clips),
      DOUBLE_KEY("assess.tolerance", tolerance),
      SIZE_KEY("assess.permutations", permutations),

      Key{"split.mode",
          [](RunConfig& c, const std::string& k, const std::string& v) {
            const auto m = parse_split_mode(v);
            if (!m) bad_value(k, v, "block or random");
            c.split_mode = *m;
          },
          [](const RunConfig& c) { return std::string(to_string(c.split_mode)); }},
      SIZE_KEY("split.folds", folds),

      SIZE_KEY("synth.n_td", synth.n_td),
      SIZE_KEY("synth.n_asd", synth.n_asd),
      DOUBLE_KEY("synth.slant_deg", synth.slant_deg),
      DOUBLE_KEY("synth.asymmetry_ratio", synth.asymmetry_ratio),
      DOUBLE_KEY("synth.speed_ratio", synth.speed_ratio),
      DOUBLE_KEY("synth.noise_sigma", synth.noise_sigma),
      SIZE_KEY("synth.frames", synth.frames),
      DOUBLE_KEY("synth.frame_rate", synth.frame_rate),

      Key{"stats.reference",
          [](RunConfig& c, const std::string& k, const std::string& v) {
            if (v == "vertical") c.angles.reference = AngleReference::vertical;
            else if (v == "spine") c.angles.reference = AngleReference::spine_axis;
            else bad_value(k, v, "vertical or spine");
          },
          [](const RunConfig& c) {
            return std::string(c.angles.reference == AngleReference::vertical ? "vertical" : "spine");
          }},
      Key{"stats.convention",
          [](RunConfig& c, const std::string& k, const std::string& v) {
            if (v == "line") c.angles.convention = AngleConvention::line;
            else if (v == "ray") c.angles.convention = AngleConvention::ray;
            else bad_value(k, v, "line or ray");
          },
          [](const RunConfig& c) {
            return std::string(c.angles.convention == AngleConvention::line ? "line" : "ray");
          }},
  };
  return table;
}

#undef SIZE_KEY
#undef DOUBLE_KEY
#undef BOOL_KEY

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
  for (const Key& k : keys()) {
    if (key == k.name) {
      k.set(*this, key, value);
      return;
    }
  }
  throw ConfigError("unknown config key '" + key + "'");
}

NetworkConfig RunConfig::network_config() const {
  NetworkConfig n = network;
  n.seed = seed;
  n.epsilon = preprocess.epsilon;
  if (co_learning) {
    CoLearningConfig co = skepxel;
    co.image.seed = derive_seed(seed, 3);
    n.co_learning = co;
  } else {
    n.co_learning.reset();
  }
  return n;
}

EvaluationConfig RunConfig::evaluation_config() const {
  EvaluationConfig e;
  e.network = network_config();
  e.clips = clips;
  e.svr = svr;
  e.svr.seed = derive_seed(seed, 2);
  e.tolerance = tolerance;
  e.mode = split_mode;
  e.folds = folds;
  e.seed = seed;
  e.permutations = permutations;
  return e;
}

SynthConfig RunConfig::synth_config() const {
  SynthConfig s = synth;
  s.seed = seed;
  return s;
}

void RunConfig::validate() const {
  skelgait::validate(preprocess);
  skelgait::validate(network_config());
  skelgait::validate(svr);
  skelgait::validate(clips);
  skelgait::validate(synth_config());
  if (!(tolerance >= 0.0)) throw ConfigError("config key 'assess.tolerance' must be >= 0");
  if (folds < 2) throw ConfigError("config key 'split.folds' must be >= 2");
}

std::vector<std::pair<std::string, std::string>> describe(const RunConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const Key& k : keys()) out.emplace_back(k.name, k.get(cfg));
  return out;
}

namespace {

void apply_line(RunConfig& cfg, const std::string& line, const std::string& where) {
  const auto eq = line.find('=');
  if (eq == std::string::npos) {
    throw ConfigError(where + ": expected 'key = value', got '" + line + "'");
  }
  const std::string key = trim(line.substr(0, eq));
  const std::string value = trim(line.substr(eq + 1));
  if (key.empty()) throw ConfigError(where + ": missing key");
  try {
    cfg.set(key, value);
  } catch (const ConfigError& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

}  // namespace

void load_config_file(RunConfig& cfg, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    apply_line(cfg, line, path.string() + ":" + std::to_string(number));
  }
}

void apply_override(RunConfig& cfg, const std::string& assignment) {
  apply_line(cfg, trim(assignment), "--set");
}

}  // namespace skelgait::cli
