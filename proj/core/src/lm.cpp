#include "wmlab/lm.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace wmlab {

namespace detail {

std::vector<double> softmax(std::span<const double> logits,
                            double temperature) {
  if (!(temperature > 0.0)) {
    throw std::invalid_argument("softmax: temperature must be > 0");
  }
  std::vector<double> probs(logits.size());
  double hi = -std::numeric_limits<double>::infinity();
  for (const double l : logits) hi = std::max(hi, l / temperature);
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    probs[i] = std::exp(logits[i] / temperature - hi);
    total += probs[i];
  }
  for (double& p : probs) p /= total;
  return probs;
}

std::size_t sample_index(std::span<const double> weights, double u) {
  double total = 0.0;
  for (const double w : weights) total += w;
  const double threshold = u * total;
  double cum = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] > 0.0) last_positive = i;
    cum += weights[i];
    if (cum > threshold) return i;
  }
  return last_positive;  // float dust at the top of the CDF
}

}  // namespace detail

namespace {

void check_context(std::span<const TokenId> context, std::size_t vocab_size) {
  for (const TokenId id : context) {
    if (id >= vocab_size) {
      throw std::invalid_argument("language model: context id out of range");
    }
  }
}

}  // namespace

std::vector<double> LanguageModel::next_probs(std::span<const TokenId> context,
                                              double temperature) const {
  return detail::softmax(next_logits(context), temperature);
}

LogitVector UniformLm::next_logits(std::span<const TokenId> context) const {
  check_context(context, vocab_size_);
  return LogitVector(vocab_size_, 0.0);
}

std::vector<double> UniformLm::next_probs(std::span<const TokenId> context,
                                          double temperature) const {
  check_context(context, vocab_size_);
  if (!(temperature > 0.0)) {
    throw std::invalid_argument("softmax: temperature must be > 0");
  }
  return std::vector<double>(vocab_size_, 1.0 / vocab_size_);
}

NgramLm::NgramLm(std::size_t vocab_size, std::uint32_t order, double alpha)
    : vocab_size_(vocab_size),
      order_(order),
      alpha_(alpha),
      unigram_counts_(vocab_size, 0) {
  if (vocab_size == 0) throw std::invalid_argument("NgramLm: empty vocab");
  if (order == 0) throw std::invalid_argument("NgramLm: order must be >= 1");
  if (!(alpha > 0.0)) throw std::invalid_argument("NgramLm: alpha must be > 0");
}

void NgramLm::observe(std::span<const TokenId> context_window,
                      TokenId target) {
  std::vector<TokenId> key(context_window.begin(), context_window.end());
  ContextEntry& e = table_[std::move(key)];
  ++e.total;
  ++e.counts[target];
  ++unigram_counts_[target];
  ++unigram_total_;
}

const NgramLm::ContextEntry* NgramLm::find_context(
    std::span<const TokenId> ctx) const {
  // Transparent lookup without allocating would need a heterogeneous
  // comparator; contexts are tiny so the copy is cheap enough.
  std::vector<TokenId> key(ctx.begin(), ctx.end());
  auto it = table_.find(key);
  return it == table_.end() ? nullptr : &it->second;
}

LogitVector NgramLm::next_logits(std::span<const TokenId> context) const {
  check_context(context, vocab_size_);
  const std::size_t ctx_len = order_ - 1;
  std::vector<TokenId> ctx(ctx_len, kBosId);
  for (std::size_t i = 0; i < std::min<std::size_t>(ctx_len, context.size());
       ++i) {
    ctx[ctx_len - 1 - i] = context[context.size() - 1 - i];
  }

  const ContextEntry* e = find_context(ctx);
  const double total = e ? static_cast<double>(e->total) : 0.0;
  const double denom = total + alpha_ * static_cast<double>(vocab_size_);
  LogitVector logits(vocab_size_, std::log(alpha_) - std::log(denom));
  if (e) {
    for (const auto& [tok, count] : e->counts) {
      logits[tok] = std::log(static_cast<double>(count) + alpha_) -
                    std::log(denom);
    }
  }
  return logits;
}

std::vector<double> NgramLm::next_probs(std::span<const TokenId> context,
                                        double temperature) const {
  if (temperature != 1.0) {
    return detail::softmax(next_logits(context), temperature);
  }
  // The logits are normalized log-probabilities, so at temperature 1 the
  // simplex is available without transcendentals.
  check_context(context, vocab_size_);
  const std::size_t ctx_len = order_ - 1;
  std::vector<TokenId> ctx(ctx_len, kBosId);
  for (std::size_t i = 0; i < std::min<std::size_t>(ctx_len, context.size());
       ++i) {
    ctx[ctx_len - 1 - i] = context[context.size() - 1 - i];
  }
  const ContextEntry* e = find_context(ctx);
  const double total = e ? static_cast<double>(e->total) : 0.0;
  const double denom = total + alpha_ * static_cast<double>(vocab_size_);
  std::vector<double> probs(vocab_size_, alpha_ / denom);
  if (e) {
    for (const auto& [tok, count] : e->counts) {
      probs[tok] = (static_cast<double>(count) + alpha_) / denom;
    }
  }
  return probs;
}

std::vector<double> NgramLm::unigram_probs() const {
  const double denom = static_cast<double>(unigram_total_) +
                       alpha_ * static_cast<double>(vocab_size_);
  std::vector<double> probs(vocab_size_);
  for (std::size_t i = 0; i < vocab_size_; ++i) {
    probs[i] = (static_cast<double>(unigram_counts_[i]) + alpha_) / denom;
  }
  return probs;
}

void NgramLm::save(std::ostream& out) const {
  out << "wmlab-ngram 1\n";
  out << order_ << ' ' << alpha_ << ' ' << vocab_size_ << '\n';
  for (const auto& [ctx, entry] : table_) {
    for (const auto& [tok, count] : entry.counts) {
      for (const TokenId c : ctx) out << c << ' ';
      out << tok << ' ' << count << '\n';
    }
  }
}

NgramLm NgramLm::load(std::istream& in) {
  std::string magic;
  int version = 0;
  in >> magic >> version;
  if (magic != "wmlab-ngram" || version != 1) {
    throw std::runtime_error("NgramLm::load: unrecognized model header");
  }
  std::uint32_t order = 0;
  double alpha = 0.0;
  std::size_t vocab_size = 0;
  in >> order >> alpha >> vocab_size;
  if (!in) throw std::runtime_error("NgramLm::load: malformed header");
  NgramLm lm(vocab_size, order, alpha);

  std::vector<TokenId> window(order - 1);
  TokenId target = 0;
  std::uint64_t count = 0;
  while (true) {
    bool ok = true;
    for (TokenId& c : window) {
      if (!(in >> c)) {
        ok = false;
        break;
      }
    }
    if (!ok || !(in >> target >> count)) break;
    for (std::uint64_t i = 0; i < count; ++i) lm.observe(window, target);
  }
  return lm;
}

NgramLm train_ngram(std::span<const std::string> corpus_lines,
                    const Vocabulary& vocab, std::uint32_t order,
                    double alpha) {
  if (corpus_lines.empty()) {
    throw std::invalid_argument("train_ngram: empty corpus");
  }
  NgramLm lm(vocab.size(), order, alpha);
  const std::size_t ctx_len = order - 1;
  std::vector<TokenId> window(ctx_len);
  for (const std::string& line : corpus_lines) {
    const TokenSequence toks = encode(line, vocab);
    for (std::size_t i = 0; i < toks.size(); ++i) {
      for (std::size_t j = 0; j < ctx_len; ++j) {
        const std::size_t back = ctx_len - j;
        window[j] = back <= i ? toks[i - back] : kBosId;
      }
      lm.observe(window, toks[i]);
    }
  }
  return lm;
}

TokenSequence sample_plain(const LanguageModel& lm,
                           const TokenSequence& prompt,
                           const GenerationParams& gen) {
  TokenSequence out = prompt;
  out.reserve(prompt.size() + gen.length);
  const PrefixSeed stream{gen.seed};
  for (std::uint64_t step = 0; step < gen.length; ++step) {
    const auto probs = lm.next_probs(out, gen.temperature);
    const double u = prng_uniform(stream, step);
    out.push_back(static_cast<TokenId>(detail::sample_index(probs, u)));
  }
  return out;
}

double sequence_perplexity(const LanguageModel& lm,
                           std::span<const TokenId> tokens) {
  if (tokens.empty()) {
    throw std::invalid_argument("sequence_perplexity: empty sequence");
  }
  double log_prob_sum = 0.0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto probs = lm.next_probs(tokens.subspan(0, i), 1.0);
    const double p = probs[tokens[i]];
    if (!(p > 0.0)) {
      throw std::domain_error(
          "sequence_perplexity: zero-probability token under the model");
    }
    log_prob_sum += std::log(p);
  }
  return std::exp(-log_prob_sum / static_cast<double>(tokens.size()));
}

}  // namespace wmlab
