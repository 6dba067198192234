#pragma once

// First-order linear-chain CRF: alphabets, parameter layout, lattice scoring,
// forward-backward inference, the regularized negative log-likelihood with its
// gradient, and Viterbi decoding. All probability arithmetic is in log space.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "shallowlab/error.hpp"
#include "shallowlab/features.hpp"

namespace shallowlab::crf {

using LabelId = std::uint32_t;
using FeatureId = std::uint32_t;

/// Bijection between strings and dense ids, in insertion order.
class Alphabet {
 public:
  Alphabet() = default;
  explicit Alphabet(std::vector<std::string> items) {
    for (auto& item : items) insert(item);
  }

  std::uint32_t insert(std::string_view item) {
    auto [it, fresh] = index_.try_emplace(std::string(item),
                                          static_cast<std::uint32_t>(items_.size()));
    if (fresh) items_.emplace_back(item);
    return it->second;
  }

  std::optional<std::uint32_t> find(std::string_view item) const {
    const auto it = index_.find(std::string(item));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  const std::string& at(std::uint32_t id) const { return items_.at(id); }
  const std::vector<std::string>& items() const noexcept { return items_; }
  std::size_t size() const noexcept { return items_.size(); }

  friend bool operator==(const Alphabet& a, const Alphabet& b) {
    return a.items_ == b.items_;
  }

 private:
  std::vector<std::string> items_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

using LabelAlphabet = Alphabet;
using FeatureAlphabet = Alphabet;

/// Flat parameter vector: emission weights [feature x label], then transition
/// weights [from x to], then start weights [label].
struct ParameterLayout {
  std::size_t num_features = 0;
  std::size_t num_labels = 0;

  std::size_t emission(std::size_t feature, std::size_t label) const {
    return feature * num_labels + label;
  }
  std::size_t transition(std::size_t from, std::size_t to) const {
    return num_features * num_labels + from * num_labels + to;
  }
  std::size_t start(std::size_t label) const {
    return num_features * num_labels + num_labels * num_labels + label;
  }
  std::size_t size() const {
    return num_features * num_labels + num_labels * num_labels + num_labels;
  }
};

/// A sentence mapped onto feature ids (absent features already dropped) and,
/// for training data, gold label ids.
struct EncodedSequence {
  std::vector<std::vector<FeatureId>> features;
  std::vector<LabelId> labels;

  std::size_t size() const noexcept { return features.size(); }
};

/// Log-space potentials of one sentence.
struct Lattice {
  std::size_t length = 0;
  std::size_t num_labels = 0;
  std::vector<double> node;   // length x num_labels
  std::vector<double> edge;   // num_labels x num_labels
  std::vector<double> start;  // num_labels

  double& node_at(std::size_t t, std::size_t k) { return node[t * num_labels + k]; }
  double node_at(std::size_t t, std::size_t k) const {
    return node[t * num_labels + k];
  }
  double edge_at(std::size_t from, std::size_t to) const {
    return edge[from * num_labels + to];
  }
};

inline Lattice score_lattice(std::span<const double> weights,
                             const ParameterLayout& layout,
                             const EncodedSequence& seq) {
  const std::size_t K = layout.num_labels;
  Lattice lat;
  lat.length = seq.size();
  lat.num_labels = K;
  lat.node.assign(lat.length * K, 0.0);
  for (std::size_t t = 0; t < lat.length; ++t) {
    for (const FeatureId f : seq.features[t]) {
      const double* w = weights.data() + layout.emission(f, 0);
      for (std::size_t k = 0; k < K; ++k) lat.node_at(t, k) += w[k];
    }
  }
  lat.edge.assign(weights.begin() + static_cast<std::ptrdiff_t>(layout.transition(0, 0)),
                  weights.begin() + static_cast<std::ptrdiff_t>(layout.transition(0, 0) + K * K));
  lat.start.assign(weights.begin() + static_cast<std::ptrdiff_t>(layout.start(0)),
                   weights.begin() + static_cast<std::ptrdiff_t>(layout.start(0) + K));
  return lat;
}

/// Unnormalized log score of one label sequence.
inline double sequence_score(const Lattice& lat, std::span<const LabelId> labels) {
  if (labels.size() != lat.length) {
    throw Error(ErrorKind::length_mismatch, "label sequence length differs from lattice");
  }
  if (labels.empty()) return 0.0;
  double score = lat.start[labels[0]] + lat.node_at(0, labels[0]);
  for (std::size_t t = 1; t < labels.size(); ++t) {
    score += lat.edge_at(labels[t - 1], labels[t]) + lat.node_at(t, labels[t]);
  }
  return score;
}

inline double log_sum_exp(std::span<const double> values) {
  double peak = -std::numeric_limits<double>::infinity();
  for (double v : values) peak = std::max(peak, v);
  if (!std::isfinite(peak)) return peak;
  double sum = 0.0;
  for (double v : values) sum += std::exp(v - peak);
  return peak + std::log(sum);
}

namespace detail {

// alpha[t][k]: log total score of prefixes ending in label k at position t.
inline std::vector<double> forward(const Lattice& lat) {
  const std::size_t T = lat.length, K = lat.num_labels;
  std::vector<double> alpha(T * K);
  std::vector<double> terms(K);
  for (std::size_t k = 0; k < K; ++k) alpha[k] = lat.start[k] + lat.node_at(0, k);
  for (std::size_t t = 1; t < T; ++t) {
    for (std::size_t k = 0; k < K; ++k) {
      for (std::size_t j = 0; j < K; ++j) {
        terms[j] = alpha[(t - 1) * K + j] + lat.edge_at(j, k);
      }
      alpha[t * K + k] = lat.node_at(t, k) + log_sum_exp(terms);
    }
  }
  return alpha;
}

// beta[t][k]: log total score of suffixes following label k at position t.
inline std::vector<double> backward(const Lattice& lat) {
  const std::size_t T = lat.length, K = lat.num_labels;
  std::vector<double> beta(T * K, 0.0);
  std::vector<double> terms(K);
  for (std::size_t t = T - 1; t-- > 0;) {
    for (std::size_t j = 0; j < K; ++j) {
      for (std::size_t k = 0; k < K; ++k) {
        terms[k] = lat.edge_at(j, k) + lat.node_at(t + 1, k) + beta[(t + 1) * K + k];
      }
      beta[t * K + j] = log_sum_exp(terms);
    }
  }
  return beta;
}

}  // namespace detail

/// log Z: log-sum-exp of sequence scores over all K^T label sequences.
inline double log_partition(const Lattice& lat) {
  if (lat.length == 0) return 0.0;
  const auto alpha = detail::forward(lat);
  return log_sum_exp(std::span<const double>(alpha).last(lat.num_labels));
}

struct Marginals {
  double log_z = 0.0;
  std::vector<double> node;  // P(y_t = k), length x num_labels
  std::vector<double> edge;  // sum over t of P(y_{t-1} = j, y_t = k)
};

inline Marginals marginals(const Lattice& lat) {
  const std::size_t T = lat.length, K = lat.num_labels;
  Marginals m;
  m.node.assign(T * K, 0.0);
  m.edge.assign(K * K, 0.0);
  if (T == 0) return m;
  const auto alpha = detail::forward(lat);
  const auto beta = detail::backward(lat);
  m.log_z = log_sum_exp(std::span<const double>(alpha).last(K));
  for (std::size_t i = 0; i < T * K; ++i) {
    m.node[i] = std::exp(alpha[i] + beta[i] - m.log_z);
  }
  for (std::size_t t = 1; t < T; ++t) {
    for (std::size_t j = 0; j < K; ++j) {
      const double a = alpha[(t - 1) * K + j] - m.log_z;
      for (std::size_t k = 0; k < K; ++k) {
        m.edge[j * K + k] +=
            std::exp(a + lat.edge_at(j, k) + lat.node_at(t, k) + beta[t * K + k]);
      }
    }
  }
  return m;
}

struct Decoded {
  std::vector<LabelId> labels;
  double score = 0.0;
};

/// Max-scoring label sequence. Ties go to the lowest label index, both for
/// the final label and for every back-pointer.
inline Decoded viterbi(const Lattice& lat) {
  const std::size_t T = lat.length, K = lat.num_labels;
  Decoded out;
  if (T == 0 || K == 0) return out;
  std::vector<double> delta(T * K);
  std::vector<LabelId> back(T * K, 0);
  for (std::size_t k = 0; k < K; ++k) delta[k] = lat.start[k] + lat.node_at(0, k);
  for (std::size_t t = 1; t < T; ++t) {
    for (std::size_t k = 0; k < K; ++k) {
      LabelId best = 0;
      double best_score = delta[(t - 1) * K] + lat.edge_at(0, k);
      for (std::size_t j = 1; j < K; ++j) {
        const double s = delta[(t - 1) * K + j] + lat.edge_at(j, k);
        if (s > best_score) {
          best_score = s;
          best = static_cast<LabelId>(j);
        }
      }
      delta[t * K + k] = best_score + lat.node_at(t, k);
      back[t * K + k] = best;
    }
  }
  LabelId last = 0;
  for (std::size_t k = 1; k < K; ++k) {
    if (delta[(T - 1) * K + k] > delta[(T - 1) * K + last]) last = static_cast<LabelId>(k);
  }
  out.labels.resize(T);
  out.labels[T - 1] = last;
  for (std::size_t t = T - 1; t > 0; --t) {
    out.labels[t - 1] = back[t * K + out.labels[t]];
  }
  out.score = sequence_score(lat, out.labels);
  return out;
}

struct TrainConfig {
  double l2_sigma = 1.0;
  std::size_t max_iterations = 200;
  double tolerance = 1e-5;
  std::size_t feature_cutoff = 0;
  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

struct ObjectiveValue {
  double value = 0.0;
  std::vector<double> gradient;
};

namespace detail {

// Adds this sequence's (log Z - gold score) and its gradient contribution.
inline double accumulate_sequence(std::span<const double> weights,
                                  const ParameterLayout& layout,
                                  const EncodedSequence& seq,
                                  std::span<double> gradient) {
  const std::size_t T = seq.size(), K = layout.num_labels;
  if (T == 0) return 0.0;
  const Lattice lat = score_lattice(weights, layout, seq);
  const Marginals m = marginals(lat);
  for (std::size_t t = 0; t < T; ++t) {
    const LabelId gold = seq.labels[t];
    for (const FeatureId f : seq.features[t]) {
      double* g = gradient.data() + layout.emission(f, 0);
      for (std::size_t k = 0; k < K; ++k) g[k] += m.node[t * K + k];
      g[gold] -= 1.0;
    }
  }
  for (std::size_t k = 0; k < K; ++k) gradient[layout.start(k)] += m.node[k];
  gradient[layout.start(seq.labels[0])] -= 1.0;
  for (std::size_t j = 0; j < K; ++j) {
    for (std::size_t k = 0; k < K; ++k) {
      gradient[layout.transition(j, k)] += m.edge[j * K + k];
    }
  }
  for (std::size_t t = 1; t < T; ++t) {
    gradient[layout.transition(seq.labels[t - 1], seq.labels[t])] -= 1.0;
  }
  return m.log_z - sequence_score(lat, seq.labels);
}

}  // namespace detail

/// Regularized negative log-likelihood
///   sum_s [log Z(s) - score(s, gold)] + |w|^2 / (2 sigma^2)
/// and its gradient (expected minus empirical counts, plus w / sigma^2).
/// Sequences are accumulated in batch order, so results are bit-identical
/// across runs.
inline ObjectiveValue nll_and_gradient(std::span<const double> weights,
                                       const ParameterLayout& layout,
                                       std::span<const EncodedSequence> batch,
                                       const TrainConfig& cfg) {
  if (weights.size() != layout.size()) {
    throw Error(ErrorKind::invalid_argument, "weight vector does not match layout");
  }
  ObjectiveValue out;
  out.gradient.assign(weights.size(), 0.0);
  for (const auto& seq : batch) {
    if (seq.labels.size() != seq.size()) {
      throw Error(ErrorKind::length_mismatch, "gold labels do not match sequence length");
    }
    for (const LabelId y : seq.labels) {
      if (y >= layout.num_labels) {
        throw Error(ErrorKind::unknown_label,
                    "gold label id " + std::to_string(y) + " outside alphabet");
      }
    }
    out.value += detail::accumulate_sequence(weights, layout, seq, out.gradient);
  }
  const double inv_var = 1.0 / (cfg.l2_sigma * cfg.l2_sigma);
  double sq = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    sq += weights[i] * weights[i];
    out.gradient[i] += weights[i] * inv_var;
  }
  out.value += 0.5 * inv_var * sq;
  return out;
}

}  // namespace shallowlab::crf
