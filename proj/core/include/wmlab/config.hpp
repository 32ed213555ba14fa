#pragma once

/**
 * Flat key=value configuration with dotted section prefixes
 * (kgw.delta=2.0). '#' starts a comment; blank lines are ignored.
 * Defaults mirror the toolkit's standard hyperparameters.
 */

#include "wmlab/attack.hpp"
#include "wmlab/exp.hpp"
#include "wmlab/kgw.hpp"
#include "wmlab/lm.hpp"
#include "wmlab/secondary.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace wmlab {

/// Configuration problems abort a run before any row is written.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Config {
 public:
  static Config parse(const std::string& text);
  static Config load_file(const std::string& path);

  void set(std::string key, std::string value);
  bool has(const std::string& key) const;

  std::string get_string(const std::string& key,
                         const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::uint64_t get_uint(const std::string& key,
                         std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  /// Comma-separated list.
  std::vector<std::string> get_list(const std::string& key,
                                    const std::vector<std::string>& fallback)
      const;

  const std::map<std::string, std::string>& entries() const {
    return entries_;
  }

 private:
  std::map<std::string, std::string> entries_;
};

enum class LmSource { toy_corpus, model_file, remote };

struct TranslatorEndpoints {
  std::string forward_url;
  std::string backward_url;
};

/// Fully resolved experiment plan.
struct ExperimentConfig {
  std::vector<std::string> methods = {"kgw", "exp"};
  std::vector<std::uint64_t> lengths = {200};
  KgwParams kgw{};
  ExpParams exp{};
  SecondaryParams secondary{};
  std::uint32_t layered_candidates = 8;
  double layered_lambda = 1.0;

  std::string attack_preset = "rtt-like";
  std::optional<ChannelParams> attack_channel;     // resolved preset/custom
  std::optional<TranslatorEndpoints> translators;  // text-level RTT instead

  std::string prompts_path;
  LmSource lm_source = LmSource::toy_corpus;
  std::string lm_corpus_path;
  std::string lm_model_path;
  std::string lm_remote_url;
  std::uint32_t lm_order = 3;
  double lm_alpha = 0.3;
  std::size_t vocab_max_size = 512;
  std::optional<std::string> vocab_file;

  double temperature = 1.0;
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  std::size_t threads = 0;  // 0 = hardware concurrency
};

/// Builds and validates the experiment plan; throws ConfigError on
/// missing/contradictory settings (e.g. not exactly one LM source).
ExperimentConfig experiment_config(const Config& cfg);

}  // namespace wmlab
