#include "wmlab/secondary.hpp"

#include "wmlab/kgw.hpp"  // detail::pad_prefix, GreenListScratch

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wmlab {

namespace {

// Rewrite cadence: within every period of kEditPeriod positions,
// kEditSpan consecutive ones are re-sampled from the window (source
// excluded); the rest anchor the source token.
constexpr std::uint32_t kEditPeriod = 20;
constexpr std::uint32_t kEditSpan = 9;
constexpr double kKeepAnchor = 6.0;
constexpr std::uint32_t kWindowRadius = 3;

KgwParams as_partition_params(const SecondaryParams& params) {
  KgwParams p;
  p.gamma = params.group_ratio;
  p.prefix_len = 1;
  p.key = params.key;
  return p;
}

}  // namespace

std::vector<TokenId> partition_vocab(const SecondaryParams& params,
                                     std::span<const TokenId> prefix,
                                     std::size_t vocab_size) {
  return green_list(as_partition_params(params), prefix, vocab_size);
}

std::vector<unsigned char> secondary_group_mask(const SecondaryParams& params,
                                                std::size_t vocab_size) {
  std::vector<unsigned char> mask(vocab_size, 0);
  for (const TokenId id : partition_vocab(params, {}, vocab_size)) {
    mask[id] = 1;
  }
  return mask;
}

TokenSequence rewatermark(std::span<const TokenId> text,
                          const LanguageModel& lm,
                          const SecondaryParams& params,
                          const GenerationParams& gen) {
  if (text.empty()) {
    throw std::invalid_argument("rewatermark: empty input");
  }
  const std::size_t vocab = lm.vocab_size();
  const auto group = secondary_group_mask(params, vocab);
  const double group_boost = std::exp(params.rewrite_bias);
  const double anchor_boost = std::exp(kKeepAnchor);

  const PrefixSeed stream{gen.seed};
  const std::uint32_t offset =
      static_cast<std::uint32_t>(prng_below(stream, 0, kEditPeriod));

  TokenSequence out;
  out.reserve(text.size());
  std::vector<TokenId> candidates;
  std::vector<double> weights;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const bool edit =
        (i + offset) % kEditPeriod < kEditSpan && text.size() > 1;

    const std::size_t lo = i >= kWindowRadius ? i - kWindowRadius : 0;
    const std::size_t hi = std::min(text.size(), i + kWindowRadius + 1);
    candidates.assign(text.begin() + static_cast<long>(lo),
                      text.begin() + static_cast<long>(hi));
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()),
                     candidates.end());
    if (edit && candidates.size() > 1) {
      candidates.erase(
          std::remove(candidates.begin(), candidates.end(), text[i]),
          candidates.end());
    }

    const auto lm_probs = lm.next_probs(out, gen.temperature);
    weights.resize(candidates.size());
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      const TokenId tok = candidates[c];
      double w = lm_probs[tok];
      if (group[tok]) w *= group_boost;
      if (!edit && tok == text[i]) w *= anchor_boost;
      weights[c] = w;
    }
    const double u = prng_uniform(stream, i + 1);
    out.push_back(candidates[detail::sample_index(weights, u)]);
  }
  return out;
}

QScore verify_q(std::span<const TokenId> text, const SecondaryParams& params,
                std::size_t vocab_size) {
  QScore score;
  if (text.size() < 2) {
    score.abstained = true;
    return score;
  }
  const auto group = secondary_group_mask(params, vocab_size);
  std::uint64_t in_group = 0;
  for (const TokenId tok : text) {
    if (tok >= vocab_size) {
      throw std::invalid_argument("verify_q: token id out of range");
    }
    if (group[tok]) ++in_group;
  }
  const double t = static_cast<double>(text.size());
  const double g = static_cast<double>(in_group);
  const double ratio = params.group_ratio;
  score.raw_z = (g - ratio * t) / std::sqrt(ratio * (1.0 - ratio) * t);
  score.q = std::clamp(1.0 - normal_survival(score.raw_z), 0.0, 1.0);
  return score;
}

}  // namespace wmlab
