#pragma once

// Tokenizer -> POS tagger -> chunker composition.
//
// The chunker is trained with gold POS tags as features and, inside parse(),
// consumes the tagger's predictions. That train/test mismatch is deliberate.

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "shallowlab/error.hpp"
#include "shallowlab/features.hpp"
#include "shallowlab/model.hpp"
#include "shallowlab/ssf.hpp"
#include "shallowlab/tagset.hpp"
#include "shallowlab/tokenizer.hpp"
#include "shallowlab/trainer.hpp"

namespace shallowlab {

namespace pipeline_detail {

inline void require_task(const CrfModel& model, TaskKind expected) {
  if (model.metadata().task != expected) {
    throw Error(ErrorKind::invalid_argument,
                "expected a " + std::string(to_string(expected)) + " model, got a " +
                    std::string(to_string(model.metadata().task)) + " model");
  }
}

}  // namespace pipeline_detail

inline std::vector<std::string> tag_pos(const CrfModel& pos_model,
                                        std::span<const std::string> tokens) {
  pipeline_detail::require_task(pos_model, TaskKind::pos);
  if (tokens.empty()) return {};
  const auto features = pos_features(tokens, pos_model.metadata().pos_template);
  return viterbi(pos_model, features).labels;
}

/// Decoded chunk labels as BIO tags (before repair).
inline std::vector<std::string> chunk_bio(const CrfModel& chunk_model,
                                          std::span<const std::string> tokens,
                                          std::span<const std::string> pos_tags) {
  pipeline_detail::require_task(chunk_model, TaskKind::chunk);
  const auto features =
      chunk_features(tokens, pos_tags, chunk_model.metadata().chunk_template);
  if (tokens.empty()) return {};
  return viterbi(chunk_model, features).labels;
}

inline std::vector<Chunk> chunk(const CrfModel& chunk_model,
                                std::span<const std::string> tokens,
                                std::span<const std::string> pos_tags) {
  return bio_to_chunks(tokens, chunk_bio(chunk_model, tokens, pos_tags));
}

class ShallowParser {
 public:
  ShallowParser(TokenizerConfig tokenizer, CrfModel pos_model, CrfModel chunk_model,
                TagSet pos_tagset = ilmt_pos_tagset(),
                TagSet chunk_tagset = ilmt_chunk_tagset())
      : tokenizer_(std::move(tokenizer)),
        pos_model_(std::move(pos_model)),
        chunk_model_(std::move(chunk_model)),
        pos_tagset_(std::move(pos_tagset)),
        chunk_tagset_(std::move(chunk_tagset)) {
    pipeline_detail::require_task(pos_model_, TaskKind::pos);
    pipeline_detail::require_task(chunk_model_, TaskKind::chunk);
    for (const auto& label : pos_model_.labels().items()) {
      if (!pos_tagset_.contains(label)) {
        throw Error(ErrorKind::unknown_label, "POS model label '" + label +
                                                  "' is not in tagset " + pos_tagset_.name());
      }
    }
    for (const auto& label : chunk_model_.labels().items()) {
      const auto parts = split_bio(label);
      const bool ok = parts.prefix == 'O' ? label == kOutside
                                          : chunk_tagset_.contains(parts.label);
      if (!ok) {
        throw Error(ErrorKind::unknown_label,
                    "chunk model label '" + label + "' is not BIO over tagset " +
                        chunk_tagset_.name());
      }
    }
  }

  const TokenizerConfig& tokenizer() const noexcept { return tokenizer_; }
  const CrfModel& pos_model() const noexcept { return pos_model_; }
  const CrfModel& chunk_model() const noexcept { return chunk_model_; }
  const TagSet& pos_tagset() const noexcept { return pos_tagset_; }
  const TagSet& chunk_tagset() const noexcept { return chunk_tagset_; }

  /// Tags and chunks one token sequence.
  Sentence analyze(std::size_t id, std::span<const std::string> words) const {
    const auto tags = tag_pos(pos_model_, words);
    auto chunks = chunk(chunk_model_, words, tags);
    std::vector<Token> tokens;
    tokens.reserve(words.size());
    for (std::size_t i = 0; i < words.size(); ++i) tokens.push_back({words[i], tags[i]});
    return Sentence(id, std::move(tokens), std::move(chunks));
  }

 private:
  TokenizerConfig tokenizer_;
  CrfModel pos_model_;
  CrfModel chunk_model_;
  TagSet pos_tagset_;
  TagSet chunk_tagset_;
};

/// tokenize -> tag_pos -> chunk, sentence by sentence; ids are 1-based.
inline Corpus parse(const ShallowParser& parser, std::string_view raw) {
  std::vector<Sentence> sentences;
  std::size_t id = 0;
  for (const auto& ts : tokenize(raw, parser.tokenizer())) {
    sentences.push_back(parser.analyze(++id, ts.tokens));
  }
  return Corpus(std::move(sentences), parser.pos_tagset(), parser.chunk_tagset());
}

// ---- corpus-level stages ---------------------------------------------------

/// Replaces every POS tag with the tagger's prediction; chunks are kept.
inline Corpus tag_corpus(const CrfModel& pos_model, const Corpus& corpus) {
  std::vector<Sentence> out;
  out.reserve(corpus.size());
  for (const auto& s : corpus.sentences()) {
    const auto words = s.words();
    const auto tags = tag_pos(pos_model, words);
    std::vector<Token> tokens;
    for (std::size_t i = 0; i < words.size(); ++i) tokens.push_back({words[i], tags[i]});
    out.emplace_back(s.id(), std::move(tokens), s.chunks());
  }
  return Corpus(std::move(out), corpus.pos_tagset(), corpus.chunk_tagset());
}

/// Re-chunks every sentence from its own POS column (gold-POS chunking when
/// the corpus carries gold tags).
inline Corpus chunk_corpus(const CrfModel& chunk_model, const Corpus& corpus) {
  std::vector<Sentence> out;
  out.reserve(corpus.size());
  for (const auto& s : corpus.sentences()) {
    const auto words = s.words();
    out.emplace_back(s.id(), s.tokens(), chunk(chunk_model, words, s.pos_tags()));
  }
  return Corpus(std::move(out), corpus.pos_tagset(), corpus.chunk_tagset());
}

/// Tagger then chunker over an already tokenized corpus.
inline Corpus pipeline_corpus(const CrfModel& pos_model, const CrfModel& chunk_model,
                              const Corpus& corpus) {
  return chunk_corpus(chunk_model, tag_corpus(pos_model, corpus));
}

// ---- training --------------------------------------------------------------

/// One example per sentence that carries POS tags. Partially tagged
/// sentences raise MissingAnnotation.
inline std::vector<LabeledSequence> pos_training_data(const Corpus& corpus,
                                                      const PosTemplateConfig& cfg) {
  std::vector<LabeledSequence> data;
  for (const auto& s : corpus.sentences()) {
    bool any = false;
    for (const auto& t : s.tokens()) any = any || t.pos.has_value();
    if (!any) continue;
    const auto words = s.words();
    data.push_back({pos_features(words, cfg), s.pos_tags()});
  }
  return data;
}

/// One example per chunk-annotated sentence; features use the gold POS column.
inline std::vector<LabeledSequence> chunk_training_data(const Corpus& corpus,
                                                        const ChunkTemplateConfig& cfg) {
  std::vector<LabeledSequence> data;
  for (const auto& s : corpus.sentences()) {
    if (s.chunks().empty()) continue;
    const auto words = s.words();
    data.push_back({chunk_features(words, s.pos_tags(), cfg), chunks_to_bio(s)});
  }
  return data;
}

inline CrfModel train_pos_model(const Corpus& corpus, const PosTemplateConfig& tmpl,
                                const crf::TrainConfig& cfg, std::string provenance = {}) {
  const auto data = pos_training_data(corpus, tmpl);
  if (data.empty()) {
    throw Error(ErrorKind::empty_training_set, "pos: corpus has no POS-annotated sentences");
  }
  ModelMetadata meta;
  meta.task = TaskKind::pos;
  meta.pos_template = tmpl;
  meta.provenance = std::move(provenance);
  return train(data, collect_labels(data), cfg, std::move(meta));
}

inline CrfModel train_chunk_model(const Corpus& corpus, const ChunkTemplateConfig& tmpl,
                                  const crf::TrainConfig& cfg, std::string provenance = {}) {
  const auto data = chunk_training_data(corpus, tmpl);
  if (data.empty()) {
    throw Error(ErrorKind::empty_training_set, "chunk: corpus has no chunk-annotated sentences");
  }
  ModelMetadata meta;
  meta.task = TaskKind::chunk;
  meta.chunk_template = tmpl;
  meta.provenance = std::move(provenance);
  return train(data, collect_labels(data), cfg, std::move(meta));
}

/// POS model on gold POS; chunk model on gold POS features + gold BIO labels.
inline ShallowParser train_pipeline(const Corpus& corpus, const PosTemplateConfig& pos_cfg,
                                    const ChunkTemplateConfig& chunk_cfg,
                                    const crf::TrainConfig& train_cfg,
                                    TokenizerConfig tokenizer = {}) {
  auto pos_model = train_pos_model(corpus, pos_cfg, train_cfg);
  auto chunk_model = train_chunk_model(corpus, chunk_cfg, train_cfg);
  return ShallowParser(std::move(tokenizer), std::move(pos_model), std::move(chunk_model),
                       corpus.pos_tagset(), corpus.chunk_tagset());
}

}  // namespace shallowlab
