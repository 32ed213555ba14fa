#include "wmlab/tokenizer.hpp"

#include <algorithm>
#include <cctype>
#include <istream>
#include <map>
#include <ostream>
#include <span>
#include <stdexcept>

namespace wmlab {

namespace {

constexpr std::string_view kMarker = "\xe2\x96\x81";  // U+2581

bool is_space_byte(char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' ||
         c == '\f';
}

std::vector<std::string_view> split_words(std::string_view text) {
  std::vector<std::string_view> words;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space_byte(text[i])) ++i;
    std::size_t start = i;
    while (i < text.size() && !is_space_byte(text[i])) ++i;
    if (i > start) words.push_back(text.substr(start, i - start));
  }
  return words;
}

std::size_t utf8_len(unsigned char lead) {
  if (lead < 0x80) return 1;
  if ((lead >> 5) == 0x6) return 2;
  if ((lead >> 4) == 0xe) return 3;
  if ((lead >> 3) == 0x1e) return 4;
  return 1;  // invalid byte, consume singly
}

}  // namespace

std::vector<std::string_view> utf8_codepoints(std::string_view word) {
  std::vector<std::string_view> cps;
  std::size_t i = 0;
  while (i < word.size()) {
    std::size_t n = utf8_len(static_cast<unsigned char>(word[i]));
    n = std::min(n, word.size() - i);
    cps.push_back(word.substr(i, n));
    i += n;
  }
  return cps;
}

Vocabulary::Vocabulary() {
  add_unit(std::string(kBosSurface));
  add_unit(std::string(kUnkSurface));
}

TokenId Vocabulary::add_unit(std::string surface) {
  if (index_.contains(surface)) {
    throw std::invalid_argument("Vocabulary: duplicate unit " + surface);
  }
  const TokenId id = static_cast<TokenId>(surfaces_.size());
  index_.emplace(surface, id);
  surfaces_.push_back(std::move(surface));
  return id;
}

std::optional<TokenId> Vocabulary::lookup(std::string_view surface) const {
  auto it = index_.find(std::string(surface));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const std::string& Vocabulary::surface(TokenId id) const {
  if (id >= surfaces_.size()) {
    throw std::out_of_range("Vocabulary: token id out of range");
  }
  return surfaces_[id];
}

Vocabulary build_vocab(std::span<const std::string> corpus_lines,
                       std::size_t max_size) {
  if (corpus_lines.empty()) {
    throw std::invalid_argument("build_vocab: empty corpus");
  }
  if (max_size < 2) {
    throw std::invalid_argument("build_vocab: max_size must be >= 2");
  }

  // Count word units and their codepoint-fallback units. std::map keeps
  // the tie-break ordering deterministic.
  std::map<std::string, std::uint64_t> freq;
  for (const std::string& line : corpus_lines) {
    for (std::string_view word : split_words(line)) {
      std::string unit = std::string(kMarker) + std::string(word);
      ++freq[unit];
      const auto cps = utf8_codepoints(word);
      if (cps.size() > 1) {
        ++freq[std::string(kMarker) + std::string(cps[0])];
        for (std::size_t i = 1; i < cps.size(); ++i) {
          ++freq[std::string(cps[i])];
        }
      }
    }
  }

  std::vector<std::pair<std::string, std::uint64_t>> units(freq.begin(),
                                                           freq.end());
  std::stable_sort(units.begin(), units.end(),
                   [](const auto& a, const auto& b) {
                     return a.second > b.second;  // map order breaks ties
                   });

  Vocabulary vocab;
  const std::size_t want = max_size - 2;
  for (std::size_t i = 0; i < units.size() && i < want; ++i) {
    vocab.add_unit(units[i].first);
  }
  return vocab;
}

TokenSequence encode(std::string_view text, const Vocabulary& vocab) {
  TokenSequence out;
  std::string unit;
  for (std::string_view word : split_words(text)) {
    unit.assign(kMarker);
    unit.append(word);
    if (auto id = vocab.lookup(unit)) {
      out.push_back(*id);
      continue;
    }
    // Codepoint fallback: marker on the word-initial codepoint only.
    const auto cps = utf8_codepoints(word);
    for (std::size_t i = 0; i < cps.size(); ++i) {
      if (i == 0) {
        unit.assign(kMarker);
        unit.append(cps[i]);
      } else {
        unit.assign(cps[i]);
      }
      if (auto id = vocab.lookup(unit)) {
        out.push_back(*id);
      } else {
        out.push_back(kUnkId);
      }
    }
  }
  return out;
}

std::string decode(const TokenSequence& tokens, const Vocabulary& vocab) {
  std::string joined;
  for (const TokenId id : tokens) {
    joined += vocab.surface(id);
  }
  // Markers become spaces; strip the leading one.
  std::string out;
  out.reserve(joined.size());
  std::size_t i = 0;
  while (i < joined.size()) {
    if (joined.compare(i, kMarker.size(), kMarker) == 0) {
      out += ' ';
      i += kMarker.size();
    } else {
      out += joined[i];
      ++i;
    }
  }
  if (!out.empty() && out.front() == ' ') out.erase(out.begin());
  return out;
}

void save_vocab(const Vocabulary& vocab, std::ostream& out) {
  for (TokenId id = 2; id < vocab.size(); ++id) {
    out << vocab.surface(id) << '\n';
  }
}

Vocabulary load_vocab(std::istream& in) {
  Vocabulary vocab;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    vocab.add_unit(line);
  }
  return vocab;
}

}  // namespace wmlab
