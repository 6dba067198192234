#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "shallowlab/crf.hpp"
#include "shallowlab/error.hpp"
#include "support/oracles.hpp"

using namespace shallowlab;
using namespace shallowlab::crf;

namespace {

double relative_error(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

EncodedSequence plain_sequence(std::size_t T) {
  EncodedSequence seq;
  seq.features.resize(T);
  seq.labels.assign(T, 0);
  return seq;
}

}  // namespace

TEST(Lattice, ZeroWeightsScoreZero) {
  const ParameterLayout layout{3, 2};
  const std::vector<double> w(layout.size(), 0.0);
  EncodedSequence seq = plain_sequence(3);
  seq.features = {{0, 1}, {2}, {}};
  const auto lat = score_lattice(w, layout, seq);
  for (double v : lat.node) EXPECT_EQ(v, 0.0);
  for (double v : lat.edge) EXPECT_EQ(v, 0.0);
  for (double v : lat.start) EXPECT_EQ(v, 0.0);
}

TEST(Lattice, SingleActiveFeature) {
  const ParameterLayout layout{2, 3};
  std::vector<double> w(layout.size(), 0.0);
  w[layout.emission(1, 2)] = 2.0;
  EncodedSequence seq = plain_sequence(2);
  seq.features = {{}, {1}};
  const auto lat = score_lattice(w, layout, seq);
  for (std::size_t t = 0; t < 2; ++t) {
    for (std::size_t k = 0; k < 3; ++k) {
      EXPECT_EQ(lat.node_at(t, k), (t == 1 && k == 2) ? 2.0 : 0.0);
    }
  }
}

TEST(Lattice, MatchesNaiveFeatureLoop) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const auto inst = oracle::random_instance(rng, 6, 4, 20);
    const auto& seq = inst.batch[0];
    const auto lat = score_lattice(inst.weights, inst.layout, seq);
    for (std::size_t t = 0; t < seq.size(); ++t) {
      for (std::size_t k = 0; k < inst.layout.num_labels; ++k) {
        EXPECT_NEAR(lat.node_at(t, k),
                    oracle::naive_node_score(inst.weights, inst.layout, seq, t, k), 1e-12);
      }
    }
  }
}

TEST(Partition, ZeroWeightsIsTLogK) {
  for (std::size_t K = 1; K <= 5; ++K) {
    for (std::size_t T = 1; T <= 7; ++T) {
      const ParameterLayout layout{2, K};
      const std::vector<double> w(layout.size(), 0.0);
      const auto lat = score_lattice(w, layout, plain_sequence(T));
      EXPECT_NEAR(log_partition(lat), static_cast<double>(T) * std::log(static_cast<double>(K)),
                  1e-12);
      const auto m = marginals(lat);
      for (double p : m.node) EXPECT_NEAR(p, 1.0 / static_cast<double>(K), 1e-10);
    }
  }
}

TEST(Partition, FourByThreeAgainstEnumeration) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    auto inst = oracle::random_instance(rng, 4, 3, 10, 1, 2.0, 3);
    auto& seq = inst.batch[0];
    while (seq.size() < 4) {
      seq.features.push_back({0});
      seq.labels.push_back(0);
    }
    const auto lat = score_lattice(inst.weights, inst.layout, seq);
    EXPECT_NEAR(log_partition(lat), oracle::enumerate(inst.weights, inst.layout, seq).log_z, 1e-8);
  }
}

TEST(Partition, SingleTokenIsLogSumExpOfStartPlusNode) {
  const ParameterLayout layout{1, 3};
  const std::vector<double> w{0.3, -1.0, 2.0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0.5, 0.25, -0.75};
  EncodedSequence seq = plain_sequence(1);
  seq.features = {{0}};
  const auto lat = score_lattice(w, layout, seq);
  const double expected =
      std::log(std::exp(0.3 + 0.5) + std::exp(-1.0 + 0.25) + std::exp(2.0 - 0.75));
  EXPECT_NEAR(log_partition(lat), expected, 1e-14);
}

TEST(Partition, BoundsAndShiftInvariance) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    auto inst = oracle::random_instance(rng, 5, 3, 8);
    const auto& seq = inst.batch[0];
    const auto lat = score_lattice(inst.weights, inst.layout, seq);
    const double log_z = log_partition(lat);
    oracle::for_each_sequence(seq.size(), inst.layout.num_labels, [&](const auto& y) {
      EXPECT_GE(log_z + 1e-12, sequence_score(lat, y));
    });
    // Adding c to every start weight shifts log Z by exactly c.
    const double c = 1.75;
    for (std::size_t k = 0; k < inst.layout.num_labels; ++k) inst.weights[inst.layout.start(k)] += c;
    EXPECT_NEAR(log_partition(score_lattice(inst.weights, inst.layout, seq)), log_z + c, 1e-10);
  }
}

TEST(Marginals, MatchEnumerationAndNormalize) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    const auto inst = oracle::random_instance(rng, 5, 3, 10);
    const auto& seq = inst.batch[0];
    const auto m = marginals(score_lattice(inst.weights, inst.layout, seq));
    const auto brute = oracle::enumerate(inst.weights, inst.layout, seq);
    const std::size_t K = inst.layout.num_labels;
    for (std::size_t t = 0; t < seq.size(); ++t) {
      double sum = 0.0;
      for (std::size_t k = 0; k < K; ++k) {
        EXPECT_NEAR(m.node[t * K + k], brute.node_marginals[t * K + k], 1e-10);
        sum += m.node[t * K + k];
      }
      EXPECT_NEAR(sum, 1.0, 1e-12);
    }
    double edge_total = 0.0;
    for (double p : m.edge) edge_total += p;
    EXPECT_NEAR(edge_total, static_cast<double>(seq.size() - 1), 1e-10);
  }
}

TEST(Gradient, MatchesCentralDifferences) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 25; ++trial) {
    const auto inst = oracle::random_instance(rng, 4, 3, 20, 1 + rng() % 3, 1.0);
    TrainConfig cfg;
    cfg.l2_sigma = 0.5 + static_cast<double>(rng() % 16) / 10.0;
    const auto analytic = nll_and_gradient(inst.weights, inst.layout, inst.batch, cfg);
    EXPECT_NEAR(analytic.value,
                oracle::brute_objective(inst.weights, inst.layout, inst.batch, cfg.l2_sigma), 1e-9);
    const auto numeric = oracle::central_differences(
        [&](std::span<const double> w) {
          return oracle::brute_objective(w, inst.layout, inst.batch, cfg.l2_sigma);
        },
        inst.weights, 1e-5);
    for (std::size_t i = 0; i < numeric.size(); ++i) {
      EXPECT_LT(relative_error(analytic.gradient[i], numeric[i]), 1e-5) << "coordinate " << i;
    }
  }
}

TEST(Gradient, EmptyBatchIsRegularizerOnly) {
  const ParameterLayout layout{2, 2};
  const std::vector<double> w{1, -2, 0.5, 0, 3, 1, -1, 2, 0.25, -0.5};
  TrainConfig cfg;
  cfg.l2_sigma = 2.0;
  const auto out = nll_and_gradient(w, layout, std::span<const EncodedSequence>{}, cfg);
  double sq = 0.0;
  for (double v : w) sq += v * v;
  EXPECT_DOUBLE_EQ(out.value, sq / 8.0);
  for (std::size_t i = 0; i < w.size(); ++i) EXPECT_DOUBLE_EQ(out.gradient[i], w[i] / 4.0);
}

TEST(Gradient, RejectsBadGoldLabels) {
  const ParameterLayout layout{1, 2};
  const std::vector<double> w(layout.size(), 0.0);
  EncodedSequence seq = plain_sequence(2);
  seq.labels = {0, 2};
  std::vector<EncodedSequence> batch{seq};
  try {
    nll_and_gradient(w, layout, batch, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::unknown_label);
  }
  batch[0].labels = {0};
  try {
    nll_and_gradient(w, layout, batch, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::length_mismatch);
  }
}

TEST(Viterbi, ZeroWeightsPickLowestIndex) {
  const ParameterLayout layout{1, 4};
  const std::vector<double> w(layout.size(), 0.0);
  const auto d = viterbi(score_lattice(w, layout, plain_sequence(5)));
  EXPECT_EQ(d.labels, std::vector<LabelId>(5, 0));
  EXPECT_EQ(d.score, 0.0);
}

TEST(Viterbi, MatchesEnumeration) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    const auto inst = oracle::random_instance(rng, 6, 3, 12);
    const auto& seq = inst.batch[0];
    const auto d = viterbi(score_lattice(inst.weights, inst.layout, seq));
    const auto brute = oracle::enumerate(inst.weights, inst.layout, seq);
    EXPECT_NEAR(d.score, brute.best_score, 1e-10);
    if (brute.unique_best) {
      EXPECT_EQ(d.labels, brute.best);
    }
  }
}

TEST(Viterbi, DominantFeaturePerPosition) {
  const std::size_t K = 3;
  const ParameterLayout layout{K, K};
  std::vector<double> w(layout.size(), 0.0);
  for (std::size_t k = 0; k < K; ++k) w[layout.emission(k, k)] = 10.0;
  EncodedSequence seq = plain_sequence(4);
  seq.features = {{2}, {0}, {1}, {2}};
  EXPECT_EQ(viterbi(score_lattice(w, layout, seq)).labels, (std::vector<LabelId>{2, 0, 1, 2}));
}

TEST(Viterbi, EmptySequence) {
  const ParameterLayout layout{1, 2};
  const std::vector<double> w(layout.size(), 0.0);
  EXPECT_TRUE(viterbi(score_lattice(w, layout, plain_sequence(0))).labels.empty());
}

TEST(Alphabet, InsertFindAt) {
  Alphabet a;
  EXPECT_EQ(a.insert("x"), 0u);
  EXPECT_EQ(a.insert("y"), 1u);
  EXPECT_EQ(a.insert("x"), 0u);
  EXPECT_EQ(a.size(), 2u);
  EXPECT_EQ(a.at(1), "y");
  EXPECT_FALSE(a.find("z").has_value());
}
