#pragma once

// Rule-based tokenizer and sentence splitter for Odia and other Indic or
// Latin-script text.
//
// Rules:
//  * words are whitespace-delimited;
//  * leading and trailing punctuation (danda, double danda, comma, quotes,
//    parentheses, ? ! . ; :) is detached one character per token, so
//    interior marks such as "3.5" or hyphens stay inside the word;
//  * a word that, minus its final '.', is a listed abbreviation keeps that
//    period ("Dr." stays one token and ends no sentence);
//  * a sentence ends after a terminator token (। ॥ . ? !); further
//    terminators and closing quotes/parentheses that follow are kept in the
//    same sentence.

#include <cstddef>
#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "shallowlab/io.hpp"
#include "shallowlab/unicode.hpp"

namespace shallowlab {

struct TokenizerConfig {
  /// Abbreviations, stored without a trailing period.
  std::set<std::string> abbreviations;

  void add_abbreviation(std::string_view entry) {
    std::string e = unicode::to_nfc(io::trim(entry));
    while (!e.empty() && e.back() == '.') e.pop_back();
    if (!e.empty()) abbreviations.insert(std::move(e));
  }

  /// One abbreviation per line; '#' lines are comments.
  static TokenizerConfig parse_abbreviations(std::string_view text) {
    unicode::require_valid_utf8(text, "abbreviation list");
    TokenizerConfig cfg;
    for (auto line : io::split_lines(text)) {
      line = io::trim(line);
      if (line.empty() || line.front() == '#') continue;
      cfg.add_abbreviation(line);
    }
    return cfg;
  }

  static TokenizerConfig load_abbreviations(const std::filesystem::path& path) {
    return parse_abbreviations(io::read_file(path));
  }
};

struct TokenizedSentence {
  std::vector<std::string> tokens;
  friend bool operator==(const TokenizedSentence&,
                         const TokenizedSentence&) = default;
};

/// Half-open code-point range [begin, end) into the NFC-normalized text.
struct SentenceSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
  friend bool operator==(const SentenceSpan&, const SentenceSpan&) = default;
};

namespace tokenizer_detail {

inline bool is_detachable(char32_t c) {
  switch (c) {
    case U'।': case U'॥':
    case U',': case U'"': case U'\'':
    case U'“': case U'”': case U'‘': case U'’':
    case U'(': case U')':
    case U'?': case U'!': case U'.': case U';': case U':':
      return true;
    default:
      return false;
  }
}

inline bool is_terminator(char32_t c) {
  return c == U'।' || c == U'॥' || c == U'.' || c == U'?' ||
         c == U'!';
}

inline bool is_closer(char32_t c) {
  return c == U'"' || c == U'\'' || c == U'”' || c == U'’' ||
         c == U')';
}

struct CodePoint {
  char32_t value;
  std::string_view bytes;
};

struct Piece {
  std::string text;
  std::size_t begin;  // code-point offsets
  std::size_t end;
  bool terminator;
  bool closer;
};

inline std::vector<Piece> split_pieces(const std::string& text,
                                       const TokenizerConfig& cfg) {
  std::vector<CodePoint> cps;
  for (std::size_t at = 0; at < text.size();) {
    const std::size_t start = at;
    const char32_t c = unicode::next_code_point(text, at);
    cps.push_back({c, std::string_view(text).substr(start, at - start)});
  }

  std::vector<Piece> pieces;
  const auto single = [&](std::size_t i) {
    const char32_t c = cps[i].value;
    pieces.push_back({std::string(cps[i].bytes), i, i + 1, is_terminator(c),
                      is_closer(c)});
  };
  const auto join = [&](std::size_t from, std::size_t to) {
    std::string s;
    for (std::size_t i = from; i < to; ++i) s += cps[i].bytes;
    return s;
  };

  std::size_t i = 0;
  while (i < cps.size()) {
    if (unicode::is_whitespace(cps[i].value)) {
      ++i;
      continue;
    }
    std::size_t end = i;
    while (end < cps.size() && !unicode::is_whitespace(cps[end].value)) ++end;

    std::size_t lo = i;
    while (lo < end && is_detachable(cps[lo].value)) single(lo++);
    std::size_t hi = end;
    while (hi > lo && is_detachable(cps[hi - 1].value)) --hi;

    if (hi > lo) {
      std::string core = join(lo, hi);
      std::size_t core_end = hi;
      if (hi < end && cps[hi].value == U'.' && cfg.abbreviations.count(core)) {
        core += '.';
        core_end = hi + 1;
      }
      pieces.push_back({std::move(core), lo, core_end, false, false});
      hi = core_end;
    }
    for (std::size_t k = hi; k < end; ++k) single(k);
    i = end;
  }
  return pieces;
}

// Groups pieces into sentences; returns [first, last) piece index pairs.
inline std::vector<std::pair<std::size_t, std::size_t>> group(
    const std::vector<Piece>& pieces) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::size_t start = 0;
  bool ended = false;
  for (std::size_t k = 0; k < pieces.size(); ++k) {
    if (ended && !pieces[k].terminator && !pieces[k].closer) {
      out.emplace_back(start, k);
      start = k;
      ended = false;
    }
    if (pieces[k].terminator) ended = true;
  }
  if (start < pieces.size()) out.emplace_back(start, pieces.size());
  return out;
}

}  // namespace tokenizer_detail

/// Tokenizes raw text into sentences. Throws InvalidEncoding on bad UTF-8.
inline std::vector<TokenizedSentence> tokenize(std::string_view raw,
                                               const TokenizerConfig& cfg = {}) {
  const std::string text = unicode::to_nfc(raw);
  const auto pieces = tokenizer_detail::split_pieces(text, cfg);
  std::vector<TokenizedSentence> out;
  for (const auto& [first, last] : tokenizer_detail::group(pieces)) {
    TokenizedSentence sentence;
    for (std::size_t k = first; k < last; ++k) {
      sentence.tokens.push_back(pieces[k].text);
    }
    out.push_back(std::move(sentence));
  }
  return out;
}

/// Sentence extents as code-point offsets into the NFC-normalized text.
inline std::vector<SentenceSpan> sentence_boundaries(
    std::string_view raw, const TokenizerConfig& cfg = {}) {
  const std::string text = unicode::to_nfc(raw);
  const auto pieces = tokenizer_detail::split_pieces(text, cfg);
  std::vector<SentenceSpan> out;
  for (const auto& [first, last] : tokenizer_detail::group(pieces)) {
    out.push_back({pieces[first].begin, pieces[last - 1].end});
  }
  return out;
}

}  // namespace shallowlab
