#pragma once

/**
 * Green-list watermarking: a keyed pseudorandom partition of the
 * vocabulary is recomputed from the trailing token prefix at every step,
 * green logits get a positive bias during sampling, and detection runs a
 * one-sided z-test on the green-token count.
 *
 * Generation and detection derive the per-step prefix from the generated
 * continuation only, BOS-padded while it is shorter than prefix_len, so a
 * detector seeing just the continuation reproduces the generation-time
 * lists exactly.
 */

#include "wmlab/lm.hpp"
#include "wmlab/numeric.hpp"
#include "wmlab/types.hpp"

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace wmlab {

struct KgwParams {
  double gamma = 0.5;       // green-list ratio
  double delta = 2.0;       // logit bias
  std::uint32_t prefix_len = 1;
  HashKey key{};
  double z_threshold = 4.0;
};

struct KgwDetection {
  std::uint64_t scored = 0;  // T
  std::uint64_t green = 0;   // G
  double z = 0.0;
  double p = 1.0;
  bool detected = false;
  bool abstained = false;  // input too short to score
};

/// The first ceil(gamma * vocab_size) entries of the seeded Fisher-Yates
/// permutation of 0..vocab_size-1 under hash_prefix(key, prefix).
/// The prefix is BOS-padded / trimmed to prefix_len.
std::vector<TokenId> green_list(const KgwParams& params,
                                std::span<const TokenId> prefix,
                                std::size_t vocab_size);

/// Copy of logits with delta added to every green entry.
std::vector<double> bias_logits(std::span<const double> logits,
                                std::span<const TokenId> green, double delta);

/// Samples gen.length tokens with green-biased sampling; returns
/// prompt + continuation. With delta == 0 the output is token-identical
/// to sample_plain under the same seed.
TokenSequence generate_kgw(const LanguageModel& lm, const TokenSequence& prompt,
                           const KgwParams& params,
                           const GenerationParams& gen);

/// Recomputes each position's green list from the observed prefixes and
/// counts matches. Returns (T, G).
std::pair<std::uint64_t, std::uint64_t> count_green(
    std::span<const TokenId> tokens, const KgwParams& params,
    std::size_t vocab_size);

/// z = (G - gamma T) / sqrt(gamma (1 - gamma) T). Throws on T == 0.
double kgw_z(std::uint64_t scored, std::uint64_t green, double gamma);

/// Full detection; abstains (detected = false) when tokens.size() <
/// prefix_len + 1.
KgwDetection detect_kgw(std::span<const TokenId> tokens,
                        const KgwParams& params, std::size_t vocab_size);

namespace detail {

/// Reusable green-membership scratch to keep batch detection cheap.
class GreenListScratch {
 public:
  /// Marks membership of the green list for (params, prefix) in mask();
  /// valid until the next call.
  void build(const KgwParams& params, std::span<const TokenId> prefix,
             std::size_t vocab_size);
  bool is_green(TokenId id) const { return mask_[id] != 0; }
  std::span<const TokenId> green_ids() const {
    return {perm_.data(), green_count_};
  }

 private:
  std::vector<TokenId> perm_;
  std::vector<unsigned char> mask_;
  std::size_t green_count_ = 0;
};

/// Prefix window of length `len`, BOS-padded on the left.
std::vector<TokenId> pad_prefix(std::span<const TokenId> tail,
                                std::uint32_t len);

}  // namespace detail

}  // namespace wmlab
