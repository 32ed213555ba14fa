#include "wmlab/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace wmlab {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace

Config Config::parse(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string trimmed = trim(line);
    if (trimmed.empty()) continue;
    const std::size_t eq = trimmed.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected key=value");
    }
    cfg.set(trim(trimmed.substr(0, eq)), trim(trimmed.substr(eq + 1)));
  }
  return cfg;
}

Config Config::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

void Config::set(std::string key, std::string value) {
  entries_[std::move(key)] = std::move(value);
}

bool Config::has(const std::string& key) const {
  return entries_.contains(key);
}

std::string Config::get_string(const std::string& key,
                               const std::string& fallback) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key, double fallback) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  try {
    std::size_t used = 0;
    const double v = std::stod(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key " + key + ": not a number: " + it->second);
  }
}

std::uint64_t Config::get_uint(const std::string& key,
                               std::uint64_t fallback) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  std::uint64_t v = 0;
  const auto& s = it->second;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw ConfigError("config key " + key + ": not an integer: " + s);
  }
  return v;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  if (it->second == "true") return true;
  if (it->second == "false") return false;
  throw ConfigError("config key " + key + ": not a boolean: " + it->second);
}

std::vector<std::string> Config::get_list(
    const std::string& key, const std::vector<std::string>& fallback) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(it->second);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

ExperimentConfig experiment_config(const Config& cfg) {
  ExperimentConfig e;

  e.methods = cfg.get_list("method", e.methods);
  if (e.methods.empty()) throw ConfigError("method: list must be non-empty");
  for (const auto& m : e.methods) {
    if (m != "kgw" && m != "exp") {
      throw ConfigError("method: unknown method '" + m + "'");
    }
  }

  e.lengths.clear();
  for (const auto& s : cfg.get_list("lengths", {"200"})) {
    try {
      e.lengths.push_back(std::stoull(s));
    } catch (const std::exception&) {
      throw ConfigError("lengths: not an integer: " + s);
    }
    if (e.lengths.back() == 0) throw ConfigError("lengths: must be >= 1");
  }

  e.kgw.gamma = cfg.get_double("kgw.gamma", e.kgw.gamma);
  if (!(e.kgw.gamma > 0.0 && e.kgw.gamma < 1.0)) {
    throw ConfigError("kgw.gamma: must be in (0,1)");
  }
  e.kgw.delta = cfg.get_double("kgw.delta", e.kgw.delta);
  if (e.kgw.delta < 0.0) throw ConfigError("kgw.delta: must be >= 0");
  e.kgw.prefix_len = static_cast<std::uint32_t>(
      cfg.get_uint("kgw.prefix_len", e.kgw.prefix_len));
  e.kgw.key.value = cfg.get_uint("kgw.hash_key", e.kgw.key.value);
  e.kgw.z_threshold = cfg.get_double("kgw.z_threshold", e.kgw.z_threshold);

  e.exp.prefix_len = static_cast<std::uint32_t>(
      cfg.get_uint("exp.prefix_len", e.exp.prefix_len));
  e.exp.key.value = cfg.get_uint("exp.hash_key", e.exp.key.value);
  e.exp.p_threshold = cfg.get_double("exp.p_threshold", e.exp.p_threshold);

  e.secondary.key.value =
      cfg.get_uint("secondary.hash_key", e.secondary.key.value);
  e.secondary.group_ratio =
      cfg.get_double("secondary.group_ratio", e.secondary.group_ratio);
  if (!(e.secondary.group_ratio > 0.0 && e.secondary.group_ratio < 1.0)) {
    throw ConfigError("secondary.group_ratio: must be in (0,1)");
  }
  e.secondary.rewrite_bias =
      cfg.get_double("secondary.rewrite_bias", e.secondary.rewrite_bias);
  e.secondary.q_floor = cfg.get_double("secondary.q_floor",
                                       e.secondary.q_floor);
  if (e.secondary.key.value == e.kgw.key.value ||
      e.secondary.key.value == e.exp.key.value) {
    throw ConfigError("secondary.hash_key: must differ from the primary key");
  }

  e.layered_candidates = static_cast<std::uint32_t>(
      cfg.get_uint("layered.n_candidates", e.layered_candidates));
  if (e.layered_candidates == 0) {
    throw ConfigError("layered.n_candidates: must be >= 1");
  }
  e.layered_lambda = cfg.get_double("layered.lambda", e.layered_lambda);
  if (e.layered_lambda < 0.0) {
    throw ConfigError("layered.lambda: must be >= 0");
  }

  const std::string fwd = cfg.get_string("attack.translator.forward_url", "");
  const std::string back =
      cfg.get_string("attack.translator.backward_url", "");
  if (!fwd.empty() || !back.empty()) {
    if (fwd.empty() || back.empty()) {
      throw ConfigError("attack.translator: both forward_url and "
                        "backward_url are required");
    }
    e.translators = TranslatorEndpoints{fwd, back};
  } else {
    e.attack_preset = cfg.get_string("attack.preset", e.attack_preset);
    ChannelParams ch;
    try {
      ch = preset_by_name(e.attack_preset);
    } catch (const std::exception& ex) {
      throw ConfigError(ex.what());
    }
    // Explicit rates override the preset.
    ch.p_sub = cfg.get_double("attack.p_sub", ch.p_sub);
    ch.p_del = cfg.get_double("attack.p_del", ch.p_del);
    ch.p_ins = cfg.get_double("attack.p_ins", ch.p_ins);
    ch.reorder_window = static_cast<std::uint32_t>(
        cfg.get_uint("attack.reorder_window", ch.reorder_window));
    e.attack_channel = ch;
  }

  e.prompts_path = cfg.get_string("prompts", "");
  if (e.prompts_path.empty()) throw ConfigError("prompts: path is required");

  e.lm_corpus_path = cfg.get_string("lm.corpus", "");
  e.lm_model_path = cfg.get_string("lm.model", "");
  e.lm_remote_url = cfg.get_string("lm.remote", "");
  const int sources = int(!e.lm_corpus_path.empty()) +
                      int(!e.lm_model_path.empty()) +
                      int(!e.lm_remote_url.empty());
  if (sources != 1) {
    throw ConfigError(
        "exactly one of lm.corpus, lm.model, lm.remote is required");
  }
  if (!e.lm_corpus_path.empty()) e.lm_source = LmSource::toy_corpus;
  if (!e.lm_model_path.empty()) e.lm_source = LmSource::model_file;
  if (!e.lm_remote_url.empty()) e.lm_source = LmSource::remote;

  e.lm_order = static_cast<std::uint32_t>(cfg.get_uint("lm.order", e.lm_order));
  e.lm_alpha = cfg.get_double("lm.alpha", e.lm_alpha);
  e.vocab_max_size = cfg.get_uint("vocab.max_size", e.vocab_max_size);
  const std::string vocab_file = cfg.get_string("vocab.file", "");
  if (!vocab_file.empty()) e.vocab_file = vocab_file;

  e.temperature = cfg.get_double("temperature", e.temperature);
  if (!(e.temperature > 0.0)) throw ConfigError("temperature: must be > 0");
  e.seed = cfg.get_uint("seed", e.seed);
  e.out_dir = cfg.get_string("out", e.out_dir);
  e.threads = cfg.get_uint("pipeline.threads", e.threads);
  return e;
}

}  // namespace wmlab
