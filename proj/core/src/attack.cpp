#include "wmlab/attack.hpp"

#include "wmlab/lm.hpp"  // detail::sample_index

#include <algorithm>
#include <stdexcept>
#include <string_view>

namespace wmlab {

namespace {

void validate(const ChannelParams& p) {
  const bool rates_ok = p.p_sub >= 0.0 && p.p_sub <= 1.0 && p.p_del >= 0.0 &&
                        p.p_del <= 1.0 && p.p_ins >= 0.0 && p.p_ins <= 1.0 &&
                        p.p_sub + p.p_del <= 1.0;
  if (!rates_ok) {
    throw std::invalid_argument("synthetic_rtt: rates out of range");
  }
  if (p.reorder_window == 0) {
    throw std::invalid_argument("synthetic_rtt: reorder_window must be >= 1");
  }
}

class ChannelStream {
 public:
  explicit ChannelStream(std::uint64_t seed) : seed_{seed} {}
  double uniform() { return prng_uniform(seed_, counter_++); }
  std::uint64_t below(std::uint64_t bound) {
    return prng_below(seed_, counter_++, bound);
  }

 private:
  PrefixSeed seed_;
  std::uint64_t counter_ = 0;
};

TokenId sample_token(std::span<const double> unigram, ChannelStream& stream) {
  return static_cast<TokenId>(
      detail::sample_index(unigram, stream.uniform()));
}

TokenId sample_token_excluding(std::span<const double> unigram,
                               ChannelStream& stream, TokenId original) {
  for (int attempt = 0; attempt < 64; ++attempt) {
    const TokenId t = sample_token(unigram, stream);
    if (t != original) return t;
  }
  // Degenerate table (all mass on `original`); pick the next positive id.
  for (std::size_t i = 1; i < unigram.size(); ++i) {
    const std::size_t j = (original + i) % unigram.size();
    if (unigram[j] > 0.0) return static_cast<TokenId>(j);
  }
  return original;
}

}  // namespace

TokenSequence synthetic_rtt(std::span<const TokenId> tokens,
                            const ChannelParams& params,
                            std::span<const double> unigram) {
  validate(params);
  if (unigram.empty()) {
    throw std::invalid_argument("synthetic_rtt: empty unigram table");
  }

  ChannelStream stream(params.seed);
  TokenSequence out;
  out.reserve(tokens.size() + tokens.size() / 8);
  for (const TokenId tok : tokens) {
    const double u = stream.uniform();
    if (u < params.p_sub) {
      out.push_back(sample_token_excluding(unigram, stream, tok));
    } else if (u < params.p_sub + params.p_del) {
      // dropped
    } else {
      out.push_back(tok);
    }
    if (stream.uniform() < params.p_ins) {
      out.push_back(sample_token(unigram, stream));
    }
  }

  if (params.reorder_window > 1) {
    const std::size_t w = params.reorder_window;
    for (std::size_t start = 0; start < out.size(); start += w) {
      const std::size_t len = std::min(w, out.size() - start);
      for (std::size_t i = 0; i + 1 < len; ++i) {
        const std::size_t j = i + stream.below(len - i);
        std::swap(out[start + i], out[start + j]);
      }
    }
  }
  return out;
}

const std::vector<SeverityPreset>& severity_presets() {
  static const std::vector<SeverityPreset> presets = {
      {"null", ChannelParams{0.0, 0.0, 0.0, 1, 0}},
      {"mild", ChannelParams{0.15, 0.02, 0.02, 2, 0}},
      {"rtt-like", ChannelParams{0.5, 0.05, 0.05, 4, 0}},
      {"severe", ChannelParams{0.8, 0.1, 0.1, 8, 0}},
  };
  return presets;
}

ChannelParams preset_by_name(std::string_view name) {
  for (const SeverityPreset& p : severity_presets()) {
    if (p.name == name) return p.params;
  }
  throw std::invalid_argument("unknown attack preset: " + std::string(name));
}

}  // namespace wmlab
