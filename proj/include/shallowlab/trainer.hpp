#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "shallowlab/crf.hpp"
#include "shallowlab/error.hpp"
#include "shallowlab/lbfgs.hpp"
#include "shallowlab/model.hpp"

namespace shallowlab {

/// Labels in order of first appearance in the data.
inline crf::LabelAlphabet collect_labels(std::span<const LabeledSequence> data) {
  crf::LabelAlphabet labels;
  for (const auto& example : data) {
    for (const auto& label : example.labels) labels.insert(label);
  }
  return labels;
}

/// Features seen at least `cutoff` times, in order of first appearance.
inline crf::FeatureAlphabet collect_features(std::span<const LabeledSequence> data,
                                             std::size_t cutoff) {
  std::vector<std::string> order;
  std::unordered_map<std::string, std::size_t> counts;
  for (const auto& example : data) {
    for (const auto& fv : example.features) {
      for (const auto& f : fv.features) {
        if (counts[f]++ == 0) order.push_back(f);
      }
    }
  }
  crf::FeatureAlphabet alphabet;
  for (const auto& f : order) {
    if (counts[f] >= cutoff) alphabet.insert(f);
  }
  return alphabet;
}

inline void validate(const crf::TrainConfig& cfg) {
  if (!(cfg.l2_sigma > 0.0) || !std::isfinite(cfg.l2_sigma)) {
    throw Error(ErrorKind::invalid_argument, "l2 sigma must be a positive finite number");
  }
  if (cfg.max_iterations == 0) {
    throw Error(ErrorKind::invalid_argument, "max iterations must be positive");
  }
  if (!(cfg.tolerance > 0.0)) {
    throw Error(ErrorKind::invalid_argument, "convergence tolerance must be positive");
  }
}

/// Fits a CRF by L-BFGS on the L2-regularized negative log-likelihood.
/// Deterministic: identical data and config give bit-identical weights.
/// `metadata.train`, `.iterations` and `.final_objective` are filled in.
inline CrfModel train(std::span<const LabeledSequence> data,
                      const crf::LabelAlphabet& labels, const crf::TrainConfig& cfg,
                      ModelMetadata metadata = {}) {
  validate(cfg);
  std::size_t tokens = 0;
  for (const auto& example : data) {
    if (example.features.size() != example.labels.size()) {
      throw Error(ErrorKind::length_mismatch, "features and gold labels differ in length");
    }
    tokens += example.labels.size();
  }
  if (data.empty() || tokens == 0) {
    throw Error(ErrorKind::empty_training_set, "no training tokens");
  }
  if (labels.size() == 0) {
    throw Error(ErrorKind::empty_training_set, "empty label alphabet");
  }

  auto features = collect_features(data, cfg.feature_cutoff);
  const crf::ParameterLayout layout{features.size(), labels.size()};
  // Encode through a zero-weight shell model so unknown gold labels are
  // reported the same way as at evaluation time.
  const CrfModel shell(labels, features, std::vector<double>(layout.size(), 0.0), {});
  std::vector<crf::EncodedSequence> encoded;
  encoded.reserve(data.size());
  for (const auto& example : data) {
    if (example.labels.empty()) continue;
    auto seq = shell.encode(example.features);
    seq.labels = shell.encode_labels(example.labels);
    encoded.push_back(std::move(seq));
  }

  optim::LbfgsOptions options;
  options.max_iterations = cfg.max_iterations;
  options.tolerance = cfg.tolerance;
  const auto result = optim::minimize_lbfgs(
      [&](std::span<const double> w) {
        return crf::nll_and_gradient(w, layout, encoded, cfg);
      },
      std::vector<double>(layout.size(), 0.0), options);
  if (!std::isfinite(result.value)) {
    throw Error(ErrorKind::non_finite_objective, "training diverged");
  }

  metadata.train = cfg;
  metadata.iterations = static_cast<std::uint32_t>(result.iterations);
  metadata.final_objective = result.value;
  return CrfModel(labels, std::move(features), result.x, std::move(metadata));
}

}  // namespace shallowlab
