#pragma once

/**
 * Post-generation watermark: rewrites existing text by re-decoding each
 * position through the LM restricted to a local window of the source,
 * with a logit bonus on a keyed token group; verification scores the
 * group-count skew of the observed text.
 *
 * The group used for embedding and verification is the key's partition
 * evaluated at the constant BOS context, so membership is a per-token
 * property: the signal survives token substitution and reordering, which
 * is exactly what the layered composition needs after heavy paraphrase
 * channels. partition_vocab still accepts arbitrary prefixes for
 * analysis of context-dependent partitions.
 *
 * The rewrite edits in spans: a seeded periodic mask forces a fraction
 * of positions to re-sample from the window (source token excluded)
 * while the rest anchor the source token with a strong bonus. Span
 * edits concentrate bigram damage, which preserves most of a primary
 * prefix-hash watermark while still moving enough tokens into the group.
 */

#include "wmlab/lm.hpp"
#include "wmlab/numeric.hpp"
#include "wmlab/types.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace wmlab {

struct SecondaryParams {
  HashKey key{32452843};      // must differ from the primary key
  double group_ratio = 0.5;
  double rewrite_bias = 2.0;  // logit bonus on in-group candidates
  double q_floor = 0.99;      // standalone detection threshold on q
};

struct QScore {
  double q = 0.5;       // 1 - normal_survival(raw_z), clamped to [0,1]
  double raw_z = 0.0;
  bool abstained = false;
};

/// Keyed partition of the vocabulary: first ceil(group_ratio * vocab_size)
/// entries of the seeded permutation under hash_prefix(key, prefix); the
/// prefix is BOS-padded / trimmed to length 1.
std::vector<TokenId> partition_vocab(const SecondaryParams& params,
                                     std::span<const TokenId> prefix,
                                     std::size_t vocab_size);

/// Group membership mask at the BOS context (the embed/verify partition).
std::vector<unsigned char> secondary_group_mask(const SecondaryParams& params,
                                                std::size_t vocab_size);

/// Rewrites text (same length) as described above. gen.seed addresses the
/// sampling stream and the edit-mask offset; gen.length is ignored.
/// Throws std::invalid_argument on empty input.
TokenSequence rewatermark(std::span<const TokenId> text,
                          const LanguageModel& lm,
                          const SecondaryParams& params,
                          const GenerationParams& gen);

/// Group-skew score: raw_z = (G' - ratio T') / sqrt(ratio (1-ratio) T'),
/// q = 1 - normal_survival(raw_z). Abstains for fewer than 2 tokens.
QScore verify_q(std::span<const TokenId> text, const SecondaryParams& params,
                std::size_t vocab_size);

}  // namespace wmlab
