#include "wmlab/layered.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace wmlab {

double semantic_similarity(std::span<const TokenId> a,
                           std::span<const TokenId> b) {
  if (a.empty() || b.empty()) {
    throw std::invalid_argument("semantic_similarity: empty input");
  }
  std::map<TokenId, double> ta, tb;
  for (const TokenId t : a) ++ta[t];
  for (const TokenId t : b) ++tb[t];
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (const auto& [tok, c] : ta) {
    na += c * c;
    auto it = tb.find(tok);
    if (it != tb.end()) dot += c * it->second;
  }
  for (const auto& [tok, c] : tb) nb += c * c;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

std::size_t select_candidate(std::span<const Candidate> candidates,
                             double lambda) {
  if (candidates.empty()) {
    throw std::invalid_argument("select_candidate: no candidates");
  }
  std::size_t best = 0;
  double best_score = lambda * candidates[0].similarity + candidates[0].q.q;
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    const double s = lambda * candidates[i].similarity + candidates[i].q.q;
    if (s > best_score) {
      best_score = s;
      best = i;
    }
  }
  return best;
}

Candidate layered_watermark(std::span<const TokenId> original,
                            const LanguageModel& lm,
                            const LayeredParams& params,
                            const GenerationParams& gen) {
  if (params.n_candidates == 0) {
    throw std::invalid_argument("layered_watermark: n_candidates must be >= 1");
  }
  if (original.empty()) {
    throw std::invalid_argument("layered_watermark: empty input");
  }
  const SimilarityFn& sim =
      params.similarity ? params.similarity : SimilarityFn(semantic_similarity);

  std::vector<Candidate> candidates;
  candidates.reserve(params.n_candidates);
  for (std::uint32_t i = 0; i < params.n_candidates; ++i) {
    const TokenId index_token = static_cast<TokenId>(i);
    GenerationParams sub = gen;
    sub.seed = hash_prefix(params.secondary.key, {&index_token, 1}).value;
    Candidate c;
    c.text = rewatermark(original, lm, params.secondary, sub);
    c.similarity = sim(original, c.text);
    c.q = verify_q(c.text, params.secondary, lm.vocab_size());
    c.combined = params.lambda * c.similarity + c.q.q;
    candidates.push_back(std::move(c));
  }
  return candidates[select_candidate(candidates, params.lambda)];
}

}  // namespace wmlab
