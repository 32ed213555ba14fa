#pragma once

/**
 * Layered watermarking: generate N rewrite candidates of an already
 * watermarked text under the secondary key, score each by semantic
 * similarity to the original and by its verification q, and keep the
 * candidate maximizing lambda * s + q.
 */

#include "wmlab/lm.hpp"
#include "wmlab/secondary.hpp"
#include "wmlab/types.hpp"

#include <cstdint>
#include <functional>
#include <span>

namespace wmlab {

using SimilarityFn =
    std::function<double(std::span<const TokenId>, std::span<const TokenId>)>;

struct LayeredParams {
  std::uint32_t n_candidates = 8;
  double lambda = 1.0;
  SecondaryParams secondary{};
  SimilarityFn similarity{};  // defaults to semantic_similarity
};

struct Candidate {
  TokenSequence text;
  double similarity = 0.0;
  QScore q{};
  double combined = 0.0;  // lambda * similarity + q.q
};

/// Cosine similarity of unigram term-frequency vectors; 1 for identical
/// sequences, 0 for disjoint vocabularies. Throws on empty input.
double semantic_similarity(std::span<const TokenId> a,
                           std::span<const TokenId> b);

/// Index of the candidate maximizing lambda * s + q; ties break to the
/// lower index. Throws on an empty candidate list.
std::size_t select_candidate(std::span<const Candidate> candidates,
                             double lambda);

/// Runs the candidate loop over rewatermark with per-candidate sub-seeds
/// hash_prefix(secondary.key, [candidate index]) and returns the winner.
/// Throws std::invalid_argument when n_candidates == 0 or the input is
/// empty.
Candidate layered_watermark(std::span<const TokenId> original,
                            const LanguageModel& lm,
                            const LayeredParams& params,
                            const GenerationParams& gen);

}  // namespace wmlab
