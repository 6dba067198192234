#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "shallowlab/crf.hpp"
#include "shallowlab/error.hpp"
#include "shallowlab/features.hpp"

namespace shallowlab {

enum class TaskKind : std::uint32_t { generic = 0, pos = 1, chunk = 2 };

inline std::string_view to_string(TaskKind task) {
  switch (task) {
    case TaskKind::pos: return "pos";
    case TaskKind::chunk: return "chunk";
    case TaskKind::generic: break;
  }
  return "generic";
}

struct ModelMetadata {
  TaskKind task = TaskKind::generic;
  PosTemplateConfig pos_template;
  ChunkTemplateConfig chunk_template;
  crf::TrainConfig train;
  std::uint32_t iterations = 0;
  double final_objective = 0.0;
  /// Resolved run configuration, "key=value" lines.
  std::string provenance;

  friend bool operator==(const ModelMetadata&, const ModelMetadata&) = default;
};

/// A trained tagger: label and feature alphabets plus the flat weight vector
/// laid out by crf::ParameterLayout. Immutable once built.
class CrfModel {
 public:
  CrfModel() = default;
  CrfModel(crf::LabelAlphabet labels, crf::FeatureAlphabet features,
           std::vector<double> weights, ModelMetadata metadata)
      : labels_(std::move(labels)),
        features_(std::move(features)),
        weights_(std::move(weights)),
        metadata_(std::move(metadata)) {
    if (weights_.size() != layout().size()) {
      throw Error(ErrorKind::invalid_argument,
                  "weight vector has " + std::to_string(weights_.size()) +
                      " entries, layout needs " + std::to_string(layout().size()));
    }
    for (double w : weights_) {
      if (!std::isfinite(w)) {
        throw Error(ErrorKind::invalid_argument, "model weight is not finite");
      }
    }
  }

  const crf::LabelAlphabet& labels() const noexcept { return labels_; }
  const crf::FeatureAlphabet& features() const noexcept { return features_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  const ModelMetadata& metadata() const noexcept { return metadata_; }

  crf::ParameterLayout layout() const {
    return {features_.size(), labels_.size()};
  }

  double emission(std::string_view feature, std::string_view label) const {
    const auto f = features_.find(feature);
    const auto k = labels_.find(label);
    if (!f || !k) return 0.0;
    return weights_[layout().emission(*f, *k)];
  }

  /// Maps feature strings to ids; unseen features are dropped.
  crf::EncodedSequence encode(std::span<const FeatureVector> vectors) const {
    crf::EncodedSequence seq;
    seq.features.resize(vectors.size());
    for (std::size_t t = 0; t < vectors.size(); ++t) {
      for (const auto& f : vectors[t].features) {
        if (const auto id = features_.find(f)) seq.features[t].push_back(*id);
      }
    }
    return seq;
  }

  /// Gold labels to ids; throws UnknownLabel for labels outside the alphabet.
  std::vector<crf::LabelId> encode_labels(std::span<const std::string> gold) const {
    std::vector<crf::LabelId> ids;
    ids.reserve(gold.size());
    for (const auto& label : gold) {
      const auto id = labels_.find(label);
      if (!id) {
        throw Error(ErrorKind::unknown_label,
                    "label '" + label + "' is not in the model's label alphabet");
      }
      ids.push_back(*id);
    }
    return ids;
  }

  friend bool operator==(const CrfModel& a, const CrfModel& b) {
    return a.labels_ == b.labels_ && a.features_ == b.features_ &&
           a.weights_ == b.weights_ && a.metadata_ == b.metadata_;
  }

 private:
  crf::LabelAlphabet labels_;
  crf::FeatureAlphabet features_;
  std::vector<double> weights_;
  ModelMetadata metadata_;
};

/// A training example in string form.
struct LabeledSequence {
  std::vector<FeatureVector> features;
  std::vector<std::string> labels;
};

inline crf::Lattice score_lattice(const CrfModel& model,
                                  std::span<const FeatureVector> vectors) {
  return crf::score_lattice(model.weights(), model.layout(), model.encode(vectors));
}

struct Prediction {
  std::vector<std::string> labels;
  double score = 0.0;
};

inline Prediction viterbi(const CrfModel& model,
                          std::span<const FeatureVector> vectors) {
  const auto decoded = crf::viterbi(score_lattice(model, vectors));
  Prediction out;
  out.score = decoded.score;
  out.labels.reserve(decoded.labels.size());
  for (const auto id : decoded.labels) out.labels.push_back(model.labels().at(id));
  return out;
}

inline crf::ObjectiveValue nll_and_gradient(const CrfModel& model,
                                            std::span<const LabeledSequence> batch,
                                            const crf::TrainConfig& cfg) {
  std::vector<crf::EncodedSequence> encoded;
  encoded.reserve(batch.size());
  for (const auto& example : batch) {
    if (example.features.size() != example.labels.size()) {
      throw Error(ErrorKind::length_mismatch, "features and gold labels differ in length");
    }
    auto seq = model.encode(example.features);
    seq.labels = model.encode_labels(example.labels);
    encoded.push_back(std::move(seq));
  }
  return crf::nll_and_gradient(model.weights(), model.layout(), encoded, cfg);
}

}  // namespace shallowlab
