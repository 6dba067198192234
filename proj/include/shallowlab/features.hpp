#pragma once

// Feature templates for the POS tagger and the chunker, and the conversion
// between SSF chunks and per-token BIO labels.
//
// Feature strings carry their template as a prefix:
//   w=        current word              pos=      current POS tag
//   preK=     prefix of K code points   sufK=     suffix of K code points
//   len=      word length in code points
//   w[-1]=    word at relative offset   pos[+1]=  POS tag at relative offset
// Positions outside the sentence read as <BOS> (left) or <EOS> (right).

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "shallowlab/error.hpp"
#include "shallowlab/ssf.hpp"
#include "shallowlab/unicode.hpp"

namespace shallowlab {

struct PosTemplateConfig {
  std::size_t prefix_max = 4;
  std::size_t suffix_max = 7;
  std::size_t window = 1;
  friend bool operator==(const PosTemplateConfig&,
                         const PosTemplateConfig&) = default;
};

struct ChunkTemplateConfig {
  std::size_t word_window = 1;
  std::size_t pos_window = 1;
  friend bool operator==(const ChunkTemplateConfig&,
                         const ChunkTemplateConfig&) = default;
};

struct FeatureVector {
  std::size_t position = 0;
  std::vector<std::string> features;
  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

namespace feature_detail {

inline std::string offset_name(std::string_view base, long offset) {
  std::string out(base);
  out += '[';
  out += offset < 0 ? '-' : '+';
  out += std::to_string(offset < 0 ? -offset : offset);
  out += "]=";
  return out;
}

template <class Column>
void add_window(std::vector<std::string>& out, std::string_view base,
                const Column& column, std::size_t position,
                std::size_t radius) {
  const auto n = static_cast<long>(column.size());
  const auto p = static_cast<long>(position);
  for (long d = -static_cast<long>(radius); d <= static_cast<long>(radius);
       ++d) {
    if (d == 0) continue;
    const long q = p + d;
    std::string f = offset_name(base, d);
    if (q < 0) {
      f += kBeginSentinel;
    } else if (q >= n) {
      f += kEndSentinel;
    } else {
      f += column[static_cast<std::size_t>(q)];
    }
    out.push_back(std::move(f));
  }
}

}  // namespace feature_detail

/// Per-position POS features: word, prefixes 1..min(m,L), suffixes
/// 1..min(n,L), length, and the word window of radius s.
inline std::vector<FeatureVector> pos_features(
    std::span<const std::string> tokens, const PosTemplateConfig& cfg = {}) {
  std::vector<FeatureVector> out;
  out.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const std::string& word = tokens[i];
    const auto cps = unicode::code_points(word);
    const std::size_t length = cps.size();
    FeatureVector fv{i, {}};
    auto& f = fv.features;
    f.reserve(3 + cfg.prefix_max + cfg.suffix_max + 2 * cfg.window);
    f.push_back("w=" + word);

    std::string affix;
    for (std::size_t k = 1; k <= std::min(cfg.prefix_max, length); ++k) {
      affix += cps[k - 1];
      f.push_back("pre" + std::to_string(k) + "=" + affix);
    }
    for (std::size_t k = 1; k <= std::min(cfg.suffix_max, length); ++k) {
      const auto start = cps[length - k].data() - word.data();
      f.push_back("suf" + std::to_string(k) + "=" +
                  word.substr(static_cast<std::size_t>(start)));
    }
    f.push_back("len=" + std::to_string(length));
    feature_detail::add_window(f, "w", tokens, i, cfg.window);
    out.push_back(std::move(fv));
  }
  return out;
}

/// Per-position chunk features: word, POS, word window of radius s1 and
/// POS window of radius s2.
inline std::vector<FeatureVector> chunk_features(
    std::span<const std::string> tokens, std::span<const std::string> pos_tags,
    const ChunkTemplateConfig& cfg = {}) {
  if (tokens.size() != pos_tags.size()) {
    throw Error(ErrorKind::length_mismatch,
                std::to_string(tokens.size()) + " tokens but " +
                    std::to_string(pos_tags.size()) + " POS tags");
  }
  std::vector<FeatureVector> out;
  out.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    FeatureVector fv{i, {}};
    fv.features.push_back("w=" + tokens[i]);
    fv.features.push_back("pos=" + pos_tags[i]);
    feature_detail::add_window(fv.features, "w", tokens, i, cfg.word_window);
    feature_detail::add_window(fv.features, "pos", pos_tags, i, cfg.pos_window);
    out.push_back(std::move(fv));
  }
  return out;
}

// ---- BIO encoding ----------------------------------------------------------

inline constexpr std::string_view kOutside = "O";

struct BioParts {
  char prefix;  // 'B', 'I' or 'O'
  std::string_view label;
};

/// Anything other than "B-X" / "I-X" (X non-empty) reads as outside.
inline BioParts split_bio(std::string_view tag) {
  if (tag.size() > 2 && (tag[0] == 'B' || tag[0] == 'I') && tag[1] == '-') {
    return {tag[0], tag.substr(2)};
  }
  return {'O', {}};
}

inline std::vector<std::string> chunks_to_bio(const Sentence& sentence) {
  std::vector<std::string> bio(sentence.size(), std::string(kOutside));
  for (const auto& c : sentence.chunks()) {
    bio[c.begin] = "B-" + c.label;
    for (std::size_t i = c.begin + 1; i < c.end; ++i) bio[i] = "I-" + c.label;
  }
  return bio;
}

/// True when every "I-X" continues a chunk labelled X.
inline bool is_well_formed_bio(std::span<const std::string> bio) {
  std::string_view open;
  for (const auto& tag : bio) {
    const auto parts = split_bio(tag);
    if (parts.prefix == 'I' && parts.label != open) return false;
    if (parts.prefix == 'O' && tag != kOutside) return false;
    open = parts.prefix == 'O' ? std::string_view{} : parts.label;
  }
  return true;
}

/// An "I-X" that does not continue an open X chunk becomes "B-X"; tags that
/// are not BIO-shaped become "O".
inline std::vector<std::string> repair_bio(std::span<const std::string> bio) {
  std::vector<std::string> out;
  out.reserve(bio.size());
  std::string open;
  for (const auto& tag : bio) {
    const auto parts = split_bio(tag);
    if (parts.prefix == 'O') {
      out.emplace_back(kOutside);
      open.clear();
    } else if (parts.prefix == 'I' && parts.label == open) {
      out.push_back(tag);
    } else {
      open = std::string(parts.label);
      out.push_back("B-" + open);
    }
  }
  return out;
}

/// Decodes (after repair) maximal B/I runs into chunks.
inline std::vector<Chunk> bio_to_chunks(std::span<const std::string> tokens,
                                        std::span<const std::string> bio) {
  if (tokens.size() != bio.size()) {
    throw Error(ErrorKind::length_mismatch,
                std::to_string(tokens.size()) + " tokens but " +
                    std::to_string(bio.size()) + " BIO labels");
  }
  const auto repaired = repair_bio(bio);
  std::vector<Chunk> chunks;
  for (std::size_t i = 0; i < repaired.size(); ++i) {
    const auto parts = split_bio(repaired[i]);
    if (parts.prefix == 'B') {
      chunks.push_back({std::string(parts.label), i, i + 1});
    } else if (parts.prefix == 'I') {
      chunks.back().end = i + 1;
    }
  }
  return chunks;
}

}  // namespace shallowlab
