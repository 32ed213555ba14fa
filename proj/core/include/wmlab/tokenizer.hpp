#pragma once

/**
 * Reversible text <-> token-id mapping with a pluggable vocabulary.
 *
 * The default scheme is word-level with codepoint fallback, using the
 * sentencepiece-style word-boundary marker U+2581 ("▁"): a unit that
 * starts a word carries the marker, continuation units do not. Decoding
 * concatenates surfaces and turns markers back into spaces, so
 * decode(encode(s)) == s for single-space-separated in-vocabulary text,
 * including non-Latin scripts (out-of-vocabulary words fall back to
 * their codepoints before mapping to UNK).
 *
 * Input is assumed NFC-normalized UTF-8; no normalization is applied.
 */

#include "wmlab/types.hpp"

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace wmlab {

class Vocabulary {
 public:
  /// Reserved surfaces for BOS (id 0) and UNK (id 1).
  static constexpr std::string_view kBosSurface = "<s>";
  static constexpr std::string_view kUnkSurface = "<unk>";

  /// Builds the two-entry reserved vocabulary.
  Vocabulary();

  /// Appends a unit; returns its id. Rejects duplicates.
  TokenId add_unit(std::string surface);

  std::size_t size() const noexcept { return surfaces_.size(); }
  std::optional<TokenId> lookup(std::string_view surface) const;

  /// Surface for a valid id; throws std::out_of_range otherwise.
  const std::string& surface(TokenId id) const;

 private:
  std::vector<std::string> surfaces_;
  std::unordered_map<std::string, TokenId> index_;
};

/// Most frequent units (frequency desc, lexicographic tie-break), capped at
/// max_size entries including the two reserved ids. Deterministic.
/// Throws std::invalid_argument on an empty corpus or max_size < 2.
Vocabulary build_vocab(std::span<const std::string> corpus_lines,
                       std::size_t max_size);

/// Whitespace-word encoding with codepoint fallback; unknown units map to
/// UNK. Empty or whitespace-only text yields an empty sequence.
TokenSequence encode(std::string_view text, const Vocabulary& vocab);

/// Inverse of encode on in-vocabulary input.
/// Throws std::out_of_range on an id outside the vocabulary.
std::string decode(const TokenSequence& tokens, const Vocabulary& vocab);

/// Persistence: UTF-8 text, one surface per line, line number = id - 2
/// (the reserved ids are implicit).
void save_vocab(const Vocabulary& vocab, std::ostream& out);
Vocabulary load_vocab(std::istream& in);

/// Splits UTF-8 text into codepoint-sized chunks (byte ranges).
std::vector<std::string_view> utf8_codepoints(std::string_view word);

}  // namespace wmlab
