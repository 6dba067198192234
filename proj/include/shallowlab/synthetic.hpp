#pragma once

// Deterministic synthetic Odia-like corpus for experiments and tests.
//
// Open-class words are a random stem plus a suffix, and the suffix alone
// determines the POS tag (every tag owns a distinct final code point).
// Chunks follow a small grammar in which the BIO label of a token is a
// function of its own and its left neighbour's POS tag:
//
//   NP  -> [JJ] NN [PSP] | PRP [PSP]      VGF -> VM [VAUX]
//   RBP -> RB                             CCP -> CC
//
// Sentences are clauses "NP+ [RBP] VGF" joined by CCP, ending in an
// unchunked danda (SYM).

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "shallowlab/ssf.hpp"
#include "shallowlab/tagset.hpp"

namespace shallowlab::synthetic {

struct Options {
  std::size_t sentences = 700;
  std::uint64_t seed = 20190701;
};

namespace detail {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  // Modulo reduction keeps streams identical across standard libraries.
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }
  bool chance(std::size_t percent) { return below(100) < percent; }
  template <class T>
  const T& pick(std::span<const T> items) { return items[below(items.size())]; }

 private:
  std::mt19937_64 engine_;
};

constexpr std::string_view kConsonants[] = {"କ", "ଖ", "ଗ", "ଚ", "ଜ", "ଟ", "ଡ", "ତ", "ଦ", "ନ",
                                            "ପ", "ବ", "ଭ", "ମ", "ଯ", "ର", "ଲ", "ଶ", "ସ", "ହ"};
constexpr std::string_view kVowelSigns[] = {"", "", "ା", "ି", "ୀ", "ୁ", "ୂ", "େ", "ୋ"};

constexpr std::string_view kNounSuffixes[] = {"ଟି", "ଗୁଡି", "ମାନି"};
constexpr std::string_view kAdjSuffixes[] = {"ତା", "ଳା"};
constexpr std::string_view kVerbSuffixes[] = {"ଲେ", "ଛେ", "ବେ"};
constexpr std::string_view kAdverbSuffixes[] = {"ରୁ", "ଭାବରୁ"};
constexpr std::string_view kAuxiliaries[] = {"ଅଛିଲ", "ଥିଲ"};
constexpr std::string_view kPostpositions[] = {"ପାଇଁ", "ଠାଁ"};
constexpr std::string_view kPronouns[] = {"ଆମର", "ତୁମର", "ମୋର"};
constexpr std::string_view kConjunctions[] = {"ଓ", "ଏବଂ"};

struct Builder {
  Rng& rng;
  std::vector<Token> tokens;
  std::vector<Chunk> chunks;

  std::string stem() {
    std::string s;
    const std::size_t syllables = 1 + rng.below(3);
    for (std::size_t i = 0; i < syllables; ++i) {
      s += rng.pick(std::span<const std::string_view>(kConsonants));
      s += rng.pick(std::span<const std::string_view>(kVowelSigns));
    }
    return s;
  }

  void word(std::string text, std::string_view pos) {
    tokens.push_back({std::move(text), std::string(pos)});
  }
  void open_word(std::span<const std::string_view> suffixes, std::string_view pos) {
    word(stem() + std::string(rng.pick(suffixes)), pos);
  }
  void closed_word(std::span<const std::string_view> words, std::string_view pos) {
    word(std::string(rng.pick(words)), pos);
  }

  template <class Fn>
  void chunk(std::string_view label, Fn&& body) {
    const std::size_t begin = tokens.size();
    body();
    chunks.push_back({std::string(label), begin, tokens.size()});
  }

  void noun_phrase() {
    chunk("NP", [&] {
      if (rng.chance(25)) {
        closed_word(kPronouns, "PRP");
      } else {
        if (rng.chance(40)) open_word(kAdjSuffixes, "JJ");
        open_word(kNounSuffixes, "NN");
      }
      if (rng.chance(35)) closed_word(kPostpositions, "PSP");
    });
  }

  void clause() {
    const std::size_t nps = 1 + rng.below(3);
    for (std::size_t i = 0; i < nps; ++i) noun_phrase();
    if (rng.chance(40)) chunk("RBP", [&] { open_word(kAdverbSuffixes, "RB"); });
    chunk("VGF", [&] {
      open_word(kVerbSuffixes, "VM");
      if (rng.chance(50)) closed_word(kAuxiliaries, "VAUX");
    });
  }
};

}  // namespace detail

inline Corpus make_corpus(const Options& options = {}) {
  detail::Rng rng(options.seed);
  std::vector<Sentence> sentences;
  sentences.reserve(options.sentences);
  for (std::size_t id = 1; id <= options.sentences; ++id) {
    detail::Builder b{rng, {}, {}};
    const std::size_t clauses = 1 + rng.below(3);
    for (std::size_t c = 0; c < clauses; ++c) {
      if (c > 0) b.chunk("CCP", [&] { b.closed_word(detail::kConjunctions, "CC"); });
      b.clause();
    }
    b.word("।", "SYM");
    sentences.emplace_back(id, std::move(b.tokens), std::move(b.chunks));
  }
  return Corpus(std::move(sentences), ilmt_pos_tagset(), ilmt_chunk_tagset());
}

/// Replaces the POS tag of round(fraction * tokens) randomly chosen tokens
/// with a different tag drawn from the tags present in the corpus.
inline Corpus inject_pos_noise(const Corpus& corpus, double fraction, std::uint64_t seed) {
  std::vector<std::pair<std::size_t, std::size_t>> positions;
  std::vector<std::string> tags;
  for (std::size_t s = 0; s < corpus.size(); ++s) {
    const auto& tokens = corpus.sentences()[s].tokens();
    for (std::size_t t = 0; t < tokens.size(); ++t) {
      positions.emplace_back(s, t);
      if (tokens[t].pos &&
          std::find(tags.begin(), tags.end(), *tokens[t].pos) == tags.end()) {
        tags.push_back(*tokens[t].pos);
      }
    }
  }
  if (tags.size() < 2) return corpus;
  detail::Rng rng(seed);
  for (std::size_t i = positions.size(); i > 1; --i) {
    std::swap(positions[i - 1], positions[rng.below(i)]);
  }
  const auto count = static_cast<std::size_t>(
      static_cast<double>(positions.size()) * fraction + 0.5);

  std::vector<std::vector<Token>> tokens;
  for (const auto& s : corpus.sentences()) tokens.push_back(s.tokens());
  for (std::size_t i = 0; i < count && i < positions.size(); ++i) {
    auto& token = tokens[positions[i].first][positions[i].second];
    std::string replacement;
    do {
      replacement = tags[rng.below(tags.size())];
    } while (token.pos && replacement == *token.pos);
    token.pos = std::move(replacement);
  }
  std::vector<Sentence> out;
  for (std::size_t s = 0; s < corpus.size(); ++s) {
    const auto& src = corpus.sentences()[s];
    out.emplace_back(src.id(), std::move(tokens[s]), src.chunks());
  }
  return Corpus(std::move(out), corpus.pos_tagset(), corpus.chunk_tagset());
}

}  // namespace shallowlab::synthetic
