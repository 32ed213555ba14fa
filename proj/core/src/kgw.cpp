#include "wmlab/kgw.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace wmlab {

namespace detail {

std::vector<TokenId> pad_prefix(std::span<const TokenId> tail,
                                std::uint32_t len) {
  std::vector<TokenId> prefix(len, kBosId);
  const std::size_t take = std::min<std::size_t>(len, tail.size());
  for (std::size_t i = 0; i < take; ++i) {
    prefix[len - 1 - i] = tail[tail.size() - 1 - i];
  }
  return prefix;
}

void GreenListScratch::build(const KgwParams& params,
                             std::span<const TokenId> prefix,
                             std::size_t vocab_size) {
  const std::size_t k = static_cast<std::size_t>(
      std::ceil(params.gamma * static_cast<double>(vocab_size)));

  if (perm_.size() != vocab_size) {
    perm_.resize(vocab_size);
    mask_.assign(vocab_size, 0);
  } else {
    for (const TokenId id : green_ids()) mask_[id] = 0;
  }
  std::iota(perm_.begin(), perm_.end(), TokenId{0});

  const auto padded = pad_prefix(prefix, params.prefix_len);
  const PrefixSeed seed = hash_prefix(params.key, padded);
  for (std::size_t i = 0; i < k; ++i) {
    const std::uint64_t j =
        i + prng_below(seed, i, static_cast<std::uint64_t>(vocab_size - i));
    std::swap(perm_[i], perm_[j]);
    mask_[perm_[i]] = 1;
  }
  green_count_ = k;
}

}  // namespace detail

std::vector<TokenId> green_list(const KgwParams& params,
                                std::span<const TokenId> prefix,
                                std::size_t vocab_size) {
  detail::GreenListScratch scratch;
  scratch.build(params, prefix, vocab_size);
  const auto ids = scratch.green_ids();
  return {ids.begin(), ids.end()};
}

std::vector<double> bias_logits(std::span<const double> logits,
                                std::span<const TokenId> green, double delta) {
  std::vector<double> out(logits.begin(), logits.end());
  for (const TokenId id : green) {
    if (id >= out.size()) {
      throw std::invalid_argument("bias_logits: green id out of range");
    }
    out[id] += delta;
  }
  return out;
}

TokenSequence generate_kgw(const LanguageModel& lm, const TokenSequence& prompt,
                           const KgwParams& params,
                           const GenerationParams& gen) {
  const std::size_t vocab = lm.vocab_size();
  TokenSequence out = prompt;
  out.reserve(prompt.size() + gen.length);
  const PrefixSeed stream{gen.seed};
  const double boost = std::exp(params.delta);
  detail::GreenListScratch scratch;
  std::vector<double> weights;
  for (std::uint64_t step = 0; step < gen.length; ++step) {
    const std::span<const TokenId> continuation{out.data() + prompt.size(),
                                                out.size() - prompt.size()};
    scratch.build(params, continuation, vocab);
    weights = lm.next_probs(out, gen.temperature);
    if (params.delta != 0.0) {
      // softmax(l/t + delta*g) == renormalized probs * e^delta on green;
      // the delta == 0 branch keeps the weights bit-identical to
      // sample_plain so the seed-stream equivalence is exact.
      for (std::size_t i = 0; i < vocab; ++i) {
        if (scratch.is_green(static_cast<TokenId>(i))) weights[i] *= boost;
      }
    }
    const double u = prng_uniform(stream, step);
    out.push_back(static_cast<TokenId>(detail::sample_index(weights, u)));
  }
  return out;
}

std::pair<std::uint64_t, std::uint64_t> count_green(
    std::span<const TokenId> tokens, const KgwParams& params,
    std::size_t vocab_size) {
  std::uint64_t green = 0;
  detail::GreenListScratch scratch;
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    scratch.build(params, tokens.subspan(0, t), vocab_size);
    if (tokens[t] >= vocab_size) {
      throw std::invalid_argument("count_green: token id out of range");
    }
    if (scratch.is_green(tokens[t])) ++green;
  }
  return {tokens.size(), green};
}

double kgw_z(std::uint64_t scored, std::uint64_t green, double gamma) {
  if (scored == 0) throw std::invalid_argument("kgw_z: T must be >= 1");
  const double t = static_cast<double>(scored);
  const double g = static_cast<double>(green);
  return (g - gamma * t) / std::sqrt(gamma * (1.0 - gamma) * t);
}

KgwDetection detect_kgw(std::span<const TokenId> tokens,
                        const KgwParams& params, std::size_t vocab_size) {
  KgwDetection result;
  if (tokens.size() < static_cast<std::size_t>(params.prefix_len) + 1) {
    result.abstained = true;
    return result;
  }
  const auto [scored, green] = count_green(tokens, params, vocab_size);
  result.scored = scored;
  result.green = green;
  result.z = kgw_z(scored, green, params.gamma);
  result.p = normal_survival(result.z);
  result.detected = result.z > params.z_threshold;
  return result;
}

}  // namespace wmlab
