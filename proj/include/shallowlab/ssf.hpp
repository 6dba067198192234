#pragma once

// Shakti Standard Format (SSF) document model, reader and writer.
//
// Accepted grammar (one row per line, tab-separated columns):
//
//   <Sentence id="N">          N is a positive integer; id=N also accepted
//   1      ((      NP          chunk open: index, "((", chunk label
//   1.1    word    POS         token: index, text, optional POS tag
//          ))                  chunk close (index column empty or absent)
//   2      ।       SYM         token outside any chunk
//   </Sentence>
//
// Blank lines are ignored. A fourth column (feature structure) is accepted
// and dropped. Chunks never nest.

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "shallowlab/error.hpp"
#include "shallowlab/io.hpp"
#include "shallowlab/tagset.hpp"
#include "shallowlab/unicode.hpp"

namespace shallowlab {

/// Reserved boundary markers used by the feature templates.
inline constexpr std::string_view kBeginSentinel = "<BOS>";
inline constexpr std::string_view kEndSentinel = "<EOS>";

inline bool is_reserved_token(std::string_view text) {
  return text == kBeginSentinel || text == kEndSentinel;
}

struct Token {
  std::string text;
  std::optional<std::string> pos;

  friend bool operator==(const Token&, const Token&) = default;
};

/// A non-recursive chunk covering tokens [begin, end) of its sentence.
struct Chunk {
  std::string label;
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const noexcept { return end - begin; }
  friend bool operator==(const Chunk&, const Chunk&) = default;
};

/// Throws InvalidToken unless `text` is a usable token string.
inline void validate_token_text(std::string_view text) {
  if (text.empty()) throw Error(ErrorKind::invalid_token, "empty token");
  if (unicode::contains_whitespace(text)) {
    throw Error(ErrorKind::invalid_token,
                "token contains whitespace: '" + std::string(text) + "'");
  }
  if (is_reserved_token(text)) {
    throw Error(ErrorKind::invalid_token,
                "token is a reserved sentinel: " + std::string(text));
  }
}

class Sentence {
 public:
  Sentence(std::size_t id, std::vector<Token> tokens,
           std::vector<Chunk> chunks = {})
      : id_(id), tokens_(std::move(tokens)), chunks_(std::move(chunks)) {
    if (id_ == 0) {
      throw Error(ErrorKind::invalid_argument, "sentence id must be positive");
    }
    if (tokens_.empty()) {
      throw Error(ErrorKind::invalid_argument,
                  "sentence " + std::to_string(id_) + " has no tokens");
    }
    for (const auto& token : tokens_) validate_token_text(token.text);
    std::size_t covered = 0;
    for (const auto& chunk : chunks_) {
      if (chunk.begin < covered || chunk.begin >= chunk.end ||
          chunk.end > tokens_.size()) {
        throw Error(ErrorKind::invalid_argument,
                    "sentence " + std::to_string(id_) +
                        ": chunks must be non-empty, ordered and disjoint");
      }
      if (chunk.label.empty()) {
        throw Error(ErrorKind::invalid_argument,
                    "sentence " + std::to_string(id_) + ": empty chunk label");
      }
      covered = chunk.end;
    }
  }

  std::size_t id() const noexcept { return id_; }
  const std::vector<Token>& tokens() const noexcept { return tokens_; }
  const std::vector<Chunk>& chunks() const noexcept { return chunks_; }
  std::size_t size() const noexcept { return tokens_.size(); }

  std::span<const Token> chunk_tokens(const Chunk& chunk) const {
    return std::span<const Token>(tokens_).subspan(chunk.begin, chunk.size());
  }

  std::vector<std::string> words() const {
    std::vector<std::string> out;
    out.reserve(tokens_.size());
    for (const auto& t : tokens_) out.push_back(t.text);
    return out;
  }

  /// POS column; throws MissingAnnotation if any token is untagged.
  std::vector<std::string> pos_tags() const {
    std::vector<std::string> out;
    out.reserve(tokens_.size());
    for (const auto& t : tokens_) {
      if (!t.pos) {
        throw Error(ErrorKind::missing_annotation,
                    "sentence " + std::to_string(id_) + ": token '" + t.text +
                        "' has no POS tag");
      }
      out.push_back(*t.pos);
    }
    return out;
  }

  bool fully_pos_tagged() const {
    for (const auto& t : tokens_) {
      if (!t.pos) return false;
    }
    return true;
  }

  friend bool operator==(const Sentence&, const Sentence&) = default;

 private:
  std::size_t id_;
  std::vector<Token> tokens_;
  std::vector<Chunk> chunks_;
};

class Corpus {
 public:
  Corpus(std::vector<Sentence> sentences, TagSet pos_tagset,
         TagSet chunk_tagset)
      : sentences_(std::move(sentences)),
        pos_tagset_(std::move(pos_tagset)),
        chunk_tagset_(std::move(chunk_tagset)) {
    std::unordered_set<std::size_t> ids;
    for (const auto& s : sentences_) {
      if (!ids.insert(s.id()).second) {
        throw Error(ErrorKind::invalid_argument,
                    "duplicate sentence id " + std::to_string(s.id()));
      }
      for (const auto& t : s.tokens()) {
        if (t.pos && !pos_tagset_.contains(*t.pos)) {
          throw Error(ErrorKind::unknown_label,
                      "POS label '" + *t.pos + "' in sentence " +
                          std::to_string(s.id()) + " is not in tagset " +
                          pos_tagset_.name());
        }
      }
      for (const auto& c : s.chunks()) {
        if (!chunk_tagset_.contains(c.label)) {
          throw Error(ErrorKind::unknown_label,
                      "chunk label '" + c.label + "' in sentence " +
                          std::to_string(s.id()) + " is not in tagset " +
                          chunk_tagset_.name());
        }
      }
    }
  }

  const std::vector<Sentence>& sentences() const noexcept { return sentences_; }
  const TagSet& pos_tagset() const noexcept { return pos_tagset_; }
  const TagSet& chunk_tagset() const noexcept { return chunk_tagset_; }
  std::size_t size() const noexcept { return sentences_.size(); }
  bool empty() const noexcept { return sentences_.empty(); }

  friend bool operator==(const Corpus&, const Corpus&) = default;

 private:
  std::vector<Sentence> sentences_;
  TagSet pos_tagset_;
  TagSet chunk_tagset_;
};

namespace ssf_detail {

inline bool is_positive_integer(std::string_view s) {
  if (s.empty() || s.size() > 18) return false;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return std::stoull(std::string(s)) > 0;
}

struct Field {
  std::string_view text;
  std::size_t column;
};

inline std::vector<Field> fields_of(std::string_view line) {
  std::vector<Field> out;
  std::size_t start = 0;
  for (auto part : io::split(line, '\t')) {
    const auto trimmed = io::trim(part);
    const std::size_t lead =
        trimmed.empty() ? 0 : static_cast<std::size_t>(trimmed.data() - part.data());
    out.push_back(
        {trimmed, 1 + unicode::code_point_length(line.substr(0, start + lead))});
    start += part.size() + 1;
  }
  return out;
}

// Parses the header row; returns 0 when the id attribute is malformed.
inline std::size_t sentence_id(std::string_view row) {
  constexpr std::string_view head = "<Sentence";
  row.remove_prefix(head.size());
  row = io::trim(row);
  if (!row.starts_with("id=") || !row.ends_with(">")) return 0;
  row.remove_prefix(3);
  row.remove_suffix(1);
  row = io::trim(row);
  if (row.size() >= 2 && (row.front() == '"' || row.front() == '\'') &&
      row.back() == row.front()) {
    row = row.substr(1, row.size() - 2);
  }
  return is_positive_integer(row) ? std::stoull(std::string(row)) : 0;
}

}  // namespace ssf_detail

/// Reads SSF text. Input is validated as UTF-8 and normalized to NFC; every
/// label is checked against the tagsets. Empty input yields an empty corpus.
inline Corpus parse_ssf(std::string_view input, const TagSet& pos_tagset,
                        const TagSet& chunk_tagset) {
  unicode::require_valid_utf8(input, "SSF input");
  const std::string text = unicode::to_nfc(input);

  std::vector<Sentence> sentences;
  std::unordered_set<std::size_t> seen_ids;

  bool in_sentence = false;
  std::size_t sentence_line = 0;
  std::size_t current_id = 0;
  std::vector<Token> tokens;
  std::vector<Chunk> chunks;
  std::optional<Chunk> open_chunk;
  std::size_t open_chunk_line = 0;

  const auto lines = io::split_lines(text);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    const std::size_t line_no = n + 1;
    const std::string_view raw = lines[n];
    const std::string_view row = io::trim(raw);
    const auto fail = [&](ErrorKind kind, const std::string& msg,
                          std::size_t column = 1) -> Error {
      return Error(kind, msg, {line_no, column});
    };
    if (row.empty()) continue;

    if (row.starts_with("<Sentence")) {
      if (in_sentence) {
        throw fail(ErrorKind::malformed_ssf,
                   "<Sentence> opened inside sentence started at line " +
                       std::to_string(sentence_line));
      }
      current_id = ssf_detail::sentence_id(row);
      if (current_id == 0) {
        throw fail(ErrorKind::malformed_ssf,
                   "expected <Sentence id=\"N\"> with positive integer N");
      }
      if (!seen_ids.insert(current_id).second) {
        throw fail(ErrorKind::malformed_ssf,
                   "duplicate sentence id " + std::to_string(current_id));
      }
      in_sentence = true;
      sentence_line = line_no;
      tokens.clear();
      chunks.clear();
      open_chunk.reset();
      continue;
    }
    if (row == "</Sentence>") {
      if (!in_sentence) {
        throw fail(ErrorKind::malformed_ssf, "</Sentence> without <Sentence>");
      }
      if (open_chunk) {
        throw fail(ErrorKind::malformed_ssf,
                   "chunk opened at line " + std::to_string(open_chunk_line) +
                       " is not closed");
      }
      if (tokens.empty()) {
        throw fail(ErrorKind::malformed_ssf,
                   "sentence " + std::to_string(current_id) + " has no tokens");
      }
      sentences.emplace_back(current_id, std::move(tokens), std::move(chunks));
      tokens = {};
      chunks = {};
      in_sentence = false;
      continue;
    }
    if (!in_sentence) {
      throw fail(ErrorKind::malformed_ssf, "row outside <Sentence> block");
    }

    const auto fields = ssf_detail::fields_of(raw);
    const bool is_close =
        row == "))" ||
        (fields.size() >= 2 && fields[0].text.empty() &&
         fields[1].text == "))" && (fields.size() == 2 || fields[2].text.empty()));
    if (is_close) {
      if (!open_chunk) {
        throw fail(ErrorKind::malformed_ssf, "'))' closes no open chunk");
      }
      open_chunk->end = tokens.size();
      if (open_chunk->size() == 0) {
        throw fail(ErrorKind::malformed_ssf,
                   "empty chunk opened at line " +
                       std::to_string(open_chunk_line));
      }
      chunks.push_back(std::move(*open_chunk));
      open_chunk.reset();
      continue;
    }
    if (fields.size() < 2 || fields[0].text.empty() || fields[1].text.empty()) {
      throw fail(ErrorKind::malformed_ssf,
                 "expected tab-separated columns: index, token, tag");
    }
    if (fields[1].text == "((") {
      if (open_chunk) {
        throw fail(ErrorKind::malformed_ssf,
                   "nested chunk (chunk opened at line " +
                       std::to_string(open_chunk_line) + " is still open)",
                   fields[1].column);
      }
      if (fields.size() < 3 || fields[2].text.empty()) {
        throw fail(ErrorKind::malformed_ssf, "chunk open row without label",
                   fields[1].column);
      }
      const std::string label(fields[2].text);
      if (!chunk_tagset.contains(label)) {
        throw fail(ErrorKind::unknown_label,
                   "chunk label '" + label + "' is not in tagset " +
                       chunk_tagset.name(),
                   fields[2].column);
      }
      open_chunk = Chunk{label, tokens.size(), tokens.size()};
      open_chunk_line = line_no;
      continue;
    }

    Token token{std::string(fields[1].text), std::nullopt};
    try {
      validate_token_text(token.text);
    } catch (const Error& e) {
      throw fail(ErrorKind::malformed_ssf, e.detail(), fields[1].column);
    }
    if (fields.size() >= 3 && !fields[2].text.empty()) {
      std::string pos(fields[2].text);
      if (!pos_tagset.contains(pos)) {
        throw fail(ErrorKind::unknown_label,
                   "POS label '" + pos + "' is not in tagset " +
                       pos_tagset.name(),
                   fields[2].column);
      }
      token.pos = std::move(pos);
    }
    tokens.push_back(std::move(token));
  }
  if (in_sentence) {
    throw Error(ErrorKind::malformed_ssf,
                "sentence opened at line " + std::to_string(sentence_line) +
                    " is missing </Sentence>",
                {lines.size() + 1, 1});
  }
  return Corpus(std::move(sentences), pos_tagset, chunk_tagset);
}

/// Writes the normalized SSF form. Deterministic; empty corpus gives "".
inline std::string serialize_ssf(const Corpus& corpus) {
  std::string out;
  const auto put_token = [&out](const std::string& index, const Token& t) {
    out += index;
    out += '\t';
    out += t.text;
    if (t.pos) {
      out += '\t';
      out += *t.pos;
    }
    out += '\n';
  };
  for (const auto& s : corpus.sentences()) {
    out += "<Sentence id=\"" + std::to_string(s.id()) + "\">\n";
    std::size_t element = 0;
    std::size_t next_chunk = 0;
    std::size_t i = 0;
    while (i < s.size()) {
      ++element;
      const auto el = std::to_string(element);
      if (next_chunk < s.chunks().size() && s.chunks()[next_chunk].begin == i) {
        const Chunk& c = s.chunks()[next_chunk++];
        out += el + "\t((\t" + c.label + "\n";
        for (std::size_t j = c.begin; j < c.end; ++j) {
          put_token(el + "." + std::to_string(j - c.begin + 1), s.tokens()[j]);
        }
        out += "\t))\n";
        i = c.end;
      } else {
        put_token(el, s.tokens()[i]);
        ++i;
      }
    }
    out += "</Sentence>\n\n";
  }
  return out;
}

/// First `train_count` sentences (document order) and the remainder.
inline std::pair<Corpus, Corpus> split_corpus(const Corpus& corpus,
                                              std::size_t train_count) {
  if (train_count > corpus.size()) {
    throw Error(ErrorKind::out_of_range,
                "train count " + std::to_string(train_count) +
                    " exceeds sentence count " + std::to_string(corpus.size()));
  }
  const auto& all = corpus.sentences();
  const auto cut = all.begin() + static_cast<std::ptrdiff_t>(train_count);
  return {Corpus({all.begin(), cut}, corpus.pos_tagset(), corpus.chunk_tagset()),
          Corpus({cut, all.end()}, corpus.pos_tagset(), corpus.chunk_tagset())};
}

struct CorpusStats {
  std::size_t sentences = 0;
  std::size_t tokens = 0;
  std::size_t chunks = 0;
  std::size_t untagged_tokens = 0;
  std::size_t unchunked_tokens = 0;
  std::map<std::string, std::size_t> pos_counts;
  std::map<std::string, std::size_t> chunk_counts;

  friend bool operator==(const CorpusStats&, const CorpusStats&) = default;
};

inline CorpusStats corpus_stats(const Corpus& corpus) {
  CorpusStats stats;
  stats.sentences = corpus.size();
  for (const auto& s : corpus.sentences()) {
    stats.tokens += s.size();
    stats.chunks += s.chunks().size();
    std::size_t chunked = 0;
    for (const auto& c : s.chunks()) {
      ++stats.chunk_counts[c.label];
      chunked += c.size();
    }
    stats.unchunked_tokens += s.size() - chunked;
    for (const auto& t : s.tokens()) {
      if (t.pos) {
        ++stats.pos_counts[*t.pos];
      } else {
        ++stats.untagged_tokens;
      }
    }
  }
  return stats;
}

}  // namespace shallowlab
