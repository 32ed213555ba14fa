#pragma once

/**
 * Next-token-distribution contract consumed by every watermarker, plus a
 * deterministic n-gram toy model for desk-scale experiments.
 *
 * Models are immutable after construction; next_logits / next_probs are
 * pure, so concurrent evaluation over many prompts is safe.
 */

#include "wmlab/numeric.hpp"
#include "wmlab/tokenizer.hpp"
#include "wmlab/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace wmlab {

/// One real score per vocabulary id (log domain for toy models).
using LogitVector = std::vector<double>;

struct GenerationParams {
  std::uint64_t length = 200;
  double temperature = 1.0;
  std::uint64_t seed = 1;
};

class LanguageModel {
 public:
  virtual ~LanguageModel() = default;

  virtual std::size_t vocab_size() const = 0;

  /// Scores for the next token given the full preceding stream.
  /// Rejects out-of-range context ids with std::invalid_argument.
  virtual LogitVector next_logits(std::span<const TokenId> context) const = 0;

  /// Probability simplex at the given temperature; the default is
  /// softmax(next_logits / temperature). Overrides must stay consistent.
  virtual std::vector<double> next_probs(std::span<const TokenId> context,
                                         double temperature) const;
};

/// Equal logits everywhere; handy for calibration tests.
class UniformLm final : public LanguageModel {
 public:
  explicit UniformLm(std::size_t vocab_size) : vocab_size_(vocab_size) {}
  std::size_t vocab_size() const override { return vocab_size_; }
  LogitVector next_logits(std::span<const TokenId> context) const override;
  std::vector<double> next_probs(std::span<const TokenId> context,
                                 double temperature) const override;

 private:
  std::size_t vocab_size_;
};

/// Order-n count model with additive smoothing: every conditional is
/// strictly positive, so downstream samplers never see zero mass.
class NgramLm final : public LanguageModel {
 public:
  NgramLm(std::size_t vocab_size, std::uint32_t order, double alpha);

  std::size_t vocab_size() const override { return vocab_size_; }
  std::uint32_t order() const noexcept { return order_; }
  double alpha() const noexcept { return alpha_; }

  LogitVector next_logits(std::span<const TokenId> context) const override;
  std::vector<double> next_probs(std::span<const TokenId> context,
                                 double temperature) const override;

  /// Smoothed marginal over single tokens (used by the attack channel).
  std::vector<double> unigram_probs() const;

  void observe(std::span<const TokenId> context_window, TokenId target);

  void save(std::ostream& out) const;
  static NgramLm load(std::istream& in);

 private:
  struct ContextEntry {
    std::uint64_t total = 0;
    std::map<TokenId, std::uint64_t> counts;
  };

  const ContextEntry* find_context(std::span<const TokenId> ctx) const;

  std::size_t vocab_size_;
  std::uint32_t order_;
  double alpha_;
  std::map<std::vector<TokenId>, ContextEntry> table_;
  std::vector<std::uint64_t> unigram_counts_;
  std::uint64_t unigram_total_ = 0;
};

/// Trains an order-n model over encoded corpus lines (BOS padding on the
/// left of each line). Throws std::invalid_argument on an empty corpus,
/// order 0, or alpha <= 0.
NgramLm train_ngram(std::span<const std::string> corpus_lines,
                    const Vocabulary& vocab, std::uint32_t order,
                    double alpha);

/// Multinomial sampling from next_probs using the counter-based stream
/// at gen.seed; appends exactly gen.length tokens to a copy of prompt.
TokenSequence sample_plain(const LanguageModel& lm,
                           const TokenSequence& prompt,
                           const GenerationParams& gen);

/// exp(-mean log-probability) of tokens under lm (natural log).
/// Throws std::domain_error if the model assigns zero probability.
double sequence_perplexity(const LanguageModel& lm,
                           std::span<const TokenId> tokens);

namespace detail {
/// Index of the first weight whose running sum exceeds u * sum(weights).
/// Shared by every sampler so that identical streams pick identical ids.
std::size_t sample_index(std::span<const double> weights, double u);
/// softmax(logits / temperature), numerically stable.
std::vector<double> softmax(std::span<const double> logits,
                            double temperature);
}  // namespace detail

}  // namespace wmlab
