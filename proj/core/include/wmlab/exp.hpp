#pragma once

/**
 * Distortion-free exponential-sampling watermark.
 *
 * Each step derives a seed from (key, trailing prefix_len tokens of the
 * continuation) and selects argmax_i u_i^{1/p_i} over the vocabulary,
 * where u_i is the seeded uniform draw for id i. Marginalized over keys
 * the selection law equals the model distribution, so no logit is ever
 * modified. Detection accumulates s_t = -ln(1 - u_token) per position;
 * under the null S ~ Gamma(T) and the p-value is the Gamma survival.
 */

#include "wmlab/lm.hpp"
#include "wmlab/numeric.hpp"
#include "wmlab/types.hpp"

#include <cstdint>
#include <span>

namespace wmlab {

struct ExpParams {
  std::uint32_t prefix_len = 4;
  HashKey key{};
  double p_threshold = 1e-4;
};

struct ExpDetection {
  std::uint64_t scored = 0;   // T
  double score_sum = 0.0;     // S
  double p = 1.0;
  bool detected = false;
  bool abstained = false;
};

/// argmax_i u_i^{1/p_i} (computed as argmin -ln(u_i)/p_i); ties break to
/// the smaller id. Throws std::invalid_argument when probs does not sum
/// to 1 within 1e-6 or contains a negative entry.
TokenId exp_sample_step(std::span<const double> probs, PrefixSeed seed);

/// gen.length tokens appended to prompt; fully deterministic for a fixed
/// key and prompt (gen.seed is not consumed).
TokenSequence generate_exp(const LanguageModel& lm, const TokenSequence& prompt,
                           const ExpParams& params,
                           const GenerationParams& gen);

/// s_t = -ln(1 - u_token) with u_token = prng_uniform(hash_prefix(key,
/// prefix), token); Exp(1)-distributed under the null.
double exp_token_score(std::span<const TokenId> prefix, TokenId token,
                       const ExpParams& params);

/// S = sum of token scores, p = Q(T, S); abstains when tokens.size() <
/// prefix_len + 1.
ExpDetection exp_detect(std::span<const TokenId> tokens,
                        const ExpParams& params);

}  // namespace wmlab
