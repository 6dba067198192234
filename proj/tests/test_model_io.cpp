#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include "shallowlab/error.hpp"
#include "shallowlab/model_io.hpp"
#include "support/fixtures.hpp"

using namespace shallowlab;

namespace {

CrfModel sample_model() {
  std::mt19937_64 rng(3);
  crf::LabelAlphabet labels({"NN", "JJ", "VM"});
  crf::FeatureAlphabet features({"w=ଭଲ", "suf1=ୁ", "len=2", "w[-1]=<BOS>"});
  const crf::ParameterLayout layout{features.size(), labels.size()};
  std::vector<double> weights(layout.size());
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (double& w : weights) w = u(rng);
  weights[0] = -0.0;
  weights[1] = 1e-300;
  ModelMetadata meta;
  meta.task = TaskKind::pos;
  meta.pos_template = {3, 5, 2};
  meta.train.l2_sigma = 0.75;
  meta.train.tolerance = 1e-7;
  meta.iterations = 42;
  meta.final_objective = 123.456;
  meta.provenance = "unit test";
  return CrfModel(labels, features, weights, meta);
}

ErrorKind load_kind(std::string_view bytes) {
  try {
    load_model(bytes);
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "model loaded";
  return ErrorKind::io;
}

}  // namespace

TEST(ModelIo, RoundTripIsIdentity) {
  const auto model = sample_model();
  const auto bytes = save_model(model);
  const auto loaded = load_model(bytes);
  EXPECT_EQ(loaded, model);
  EXPECT_EQ(save_model(loaded), bytes);
  EXPECT_TRUE(std::signbit(loaded.weights()[0]));
}

TEST(ModelIo, FileRoundTrip) {
  const auto dir = fixtures::scratch("model_io");
  const auto path = dir / "m.model";
  save_model_file(sample_model(), path);
  EXPECT_EQ(load_model_file(path), sample_model());
  EXPECT_FALSE(std::filesystem::exists(dir / "m.model.tmp"));
}

TEST(ModelIo, EveryTruncationIsCorrupt) {
  const auto bytes = save_model(sample_model());
  for (std::size_t n = 0; n < bytes.size(); ++n) {
    const auto kind = load_kind(std::string_view(bytes).substr(0, n));
    EXPECT_TRUE(kind == ErrorKind::corrupt_model) << "length " << n << ": " << to_string(kind);
  }
}

TEST(ModelIo, FutureVersion) {
  auto bytes = save_model(sample_model());
  bytes[8] = static_cast<char>(999 & 0xff);
  bytes[9] = static_cast<char>(999 >> 8);
  EXPECT_EQ(load_kind(bytes), ErrorKind::version_mismatch);
}

TEST(ModelIo, BadMagic) {
  auto bytes = save_model(sample_model());
  bytes[0] = 'X';
  EXPECT_EQ(load_kind(bytes), ErrorKind::corrupt_model);
  EXPECT_EQ(load_kind("not a model"), ErrorKind::corrupt_model);
}

TEST(ModelIo, SingleBitFlipsAreDetected) {
  const auto bytes = save_model(sample_model());
  for (std::size_t i = 12; i < bytes.size(); ++i) {
    auto copy = bytes;
    copy[i] = static_cast<char>(copy[i] ^ 0x10);
    EXPECT_EQ(load_kind(copy), ErrorKind::corrupt_model) << "byte " << i;
  }
}

TEST(ModelIo, MissingFile) {
  try {
    load_model_file(fixtures::scratch("missing") / "nope.model");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::io);
  }
}
