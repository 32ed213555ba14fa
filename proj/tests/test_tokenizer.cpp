#include <doctest.h>

#include "wmlab/numeric.hpp"
#include "wmlab/tokenizer.hpp"

#include <fstream>
#include <sstream>

using namespace wmlab;

namespace {

std::vector<std::string> lines(std::initializer_list<const char*> ls) {
  return {ls.begin(), ls.end()};
}

}  // namespace

TEST_CASE("reserved ids and tiny corpus") {
  const auto vocab = build_vocab(lines({"a a b"}), 64);
  CHECK(vocab.size() == 4);  // <s>, <unk>, ▁a, ▁b
  CHECK(vocab.surface(kBosId) == "<s>");
  CHECK(vocab.surface(kUnkId) == "<unk>");
  CHECK(vocab.lookup("▁a").has_value());
  CHECK(vocab.lookup("▁b").has_value());
}

TEST_CASE("tie-break gives the lexicographically smaller unit the smaller id") {
  const auto vocab = build_vocab(lines({"zz aa"}), 64);
  CHECK(*vocab.lookup("▁aa") < *vocab.lookup("▁zz"));
}

TEST_CASE("max_size caps the vocabulary exactly") {
  std::vector<std::string> corpus;
  for (int i = 0; i < 100; ++i) {
    corpus.push_back("w" + std::to_string(i));
  }
  const auto vocab = build_vocab(corpus, 5);
  CHECK(vocab.size() == 5);
}

TEST_CASE("encode basics") {
  const auto vocab = build_vocab(lines({"hello world"}), 64);
  CHECK(encode("", vocab).empty());
  CHECK(encode("   ", vocab).empty());
  const auto toks = encode("hello world", vocab);
  CHECK(toks.size() == 2);
  CHECK(decode(toks, vocab) == "hello world");
}

TEST_CASE("two-word Bangla string encodes as two word tokens") {
  const std::string text = "আমি বাংলায়";
  const auto vocab = build_vocab(lines({"আমি বাংলায়"}), 256);
  const auto toks = encode(text, vocab);
  CHECK(toks.size() == 2);
  CHECK(decode(toks, vocab) == text);
}

TEST_CASE("codepoint fallback covers out-of-vocabulary words") {
  // Vocab trained on text that shares codepoints with the unseen word.
  const auto vocab = build_vocab(lines({"ab ba bca"}), 256);
  const auto toks = encode("abc", vocab);  // unseen word
  CHECK(toks.size() == 3);                 // ▁a, b, c as codepoints
  CHECK(decode(toks, vocab) == "abc");
}

TEST_CASE("unknown units map to UNK and surface in decode") {
  const auto vocab = build_vocab(lines({"x"}), 64);
  const auto toks = encode("q", vocab);
  REQUIRE(toks.size() == 1);
  CHECK(toks[0] == kUnkId);
  CHECK(decode(toks, vocab).find("<unk>") != std::string::npos);
}

TEST_CASE("decode rejects out-of-range ids") {
  const auto vocab = build_vocab(lines({"a"}), 64);
  TokenSequence bad = {static_cast<TokenId>(vocab.size())};
  CHECK_THROWS_AS(decode(bad, vocab), std::out_of_range);
  CHECK(decode({}, vocab).empty());
}

TEST_CASE("build_vocab rejects an empty corpus") {
  CHECK_THROWS_AS(build_vocab({}, 64), std::invalid_argument);
}

TEST_CASE("round trip on the bundled corpus sample") {
  std::ifstream in(WMLAB_DATA_DIR "/corpus.txt");
  REQUIRE(in.good());
  std::vector<std::string> corpus;
  std::string line;
  while (std::getline(in, line)) corpus.push_back(line);
  REQUIRE(corpus.size() > 100);

  // Uncapped vocabulary: every line must round-trip exactly.
  const auto vocab = build_vocab(corpus, 100000);
  for (std::size_t i = 0; i < corpus.size(); i += 7) {
    CHECK(decode(encode(corpus[i], vocab), vocab) == corpus[i]);
  }
}

TEST_CASE("property: decode(encode(x)) == x for random in-vocab lines") {
  const auto vocab = build_vocab(
      lines({"the red fox jumps", "over lazy dogs", "আমি ভাত খাই",
             "নদী ভালো", "ein kleines haus"}),
      512);
  std::vector<std::string> words = {"the",  "red",  "fox", "jumps", "over",
                                    "lazy", "dogs", "আমি",  "ভাত",   "খাই",
                                    "নদী",  "ভালো", "ein", "kleines", "haus"};
  const PrefixSeed seed{2024};
  std::uint64_t ctr = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int len = 1 + static_cast<int>(prng_below(seed, ctr++, 12));
    std::string text;
    for (int w = 0; w < len; ++w) {
      if (w) text += ' ';
      text += words[prng_below(seed, ctr++, words.size())];
    }
    CHECK(decode(encode(text, vocab), vocab) == text);
  }
}

TEST_CASE("vocabulary persistence round-trips byte-identically") {
  const auto vocab = build_vocab(
      lines({"some words here", "আরো কিছু শব্দ", "and a few more"}), 512);
  std::ostringstream first;
  save_vocab(vocab, first);
  std::istringstream in(first.str());
  const auto loaded = load_vocab(in);
  CHECK(loaded.size() == vocab.size());
  std::ostringstream second;
  save_vocab(loaded, second);
  CHECK(first.str() == second.str());

  // Deterministic construction: same corpus, same file bytes.
  const auto vocab2 = build_vocab(
      lines({"some words here", "আরো কিছু শব্দ", "and a few more"}), 512);
  std::ostringstream third;
  save_vocab(vocab2, third);
  CHECK(first.str() == third.str());
}
