#include "wmlab/exp.hpp"

#include "wmlab/kgw.hpp"  // detail::pad_prefix

#include <cmath>
#include <limits>
#include <stdexcept>

namespace wmlab {

TokenId exp_sample_step(std::span<const double> probs, PrefixSeed seed) {
  double total = 0.0;
  for (const double p : probs) {
    if (p < 0.0) {
      throw std::invalid_argument("exp_sample_step: negative probability");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-6) {
    throw std::invalid_argument("exp_sample_step: probs must sum to 1");
  }

  TokenId best = 0;
  double best_cost = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0) continue;  // zero-mass ids can never win
    const double u = prng_uniform(seed, i);
    const double cost = -std::log(u) / probs[i];
    if (cost < best_cost) {
      best_cost = cost;
      best = static_cast<TokenId>(i);
    }
  }
  return best;
}

TokenSequence generate_exp(const LanguageModel& lm, const TokenSequence& prompt,
                           const ExpParams& params,
                           const GenerationParams& gen) {
  TokenSequence out = prompt;
  out.reserve(prompt.size() + gen.length);
  for (std::uint64_t step = 0; step < gen.length; ++step) {
    const std::span<const TokenId> continuation{out.data() + prompt.size(),
                                                out.size() - prompt.size()};
    const auto prefix = detail::pad_prefix(continuation, params.prefix_len);
    const PrefixSeed seed = hash_prefix(params.key, prefix);
    const auto probs = lm.next_probs(out, gen.temperature);
    out.push_back(exp_sample_step(probs, seed));
  }
  return out;
}

double exp_token_score(std::span<const TokenId> prefix, TokenId token,
                       const ExpParams& params) {
  const auto padded = detail::pad_prefix(prefix, params.prefix_len);
  const PrefixSeed seed = hash_prefix(params.key, padded);
  const double u = prng_uniform(seed, token);
  return -std::log1p(-u);
}

ExpDetection exp_detect(std::span<const TokenId> tokens,
                        const ExpParams& params) {
  ExpDetection result;
  if (tokens.size() < static_cast<std::size_t>(params.prefix_len) + 1) {
    result.abstained = true;
    return result;
  }
  double sum = 0.0;
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    sum += exp_token_score(tokens.subspan(0, t), tokens[t], params);
  }
  result.scored = tokens.size();
  result.score_sum = sum;
  result.p = upper_regularized_gamma(result.scored, sum);
  result.detected = result.p < params.p_threshold;
  return result;
}

}  // namespace wmlab
