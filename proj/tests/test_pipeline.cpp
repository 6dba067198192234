#include <gtest/gtest.h>

#include <random>

#include "shallowlab/error.hpp"
#include "shallowlab/evaluation.hpp"
#include "shallowlab/pipeline.hpp"
#include "shallowlab/synthetic.hpp"
#include "support/fixtures.hpp"

using namespace shallowlab;

namespace {

using Strings = std::vector<std::string>;

const ShallowParser& fixture_parser() {
  static const ShallowParser parser =
      train_pipeline(fixtures::fixture50(), {}, {}, {});
  return parser;
}

Corpus toy_chunk_corpus() {
  const Strings nouns{"କ", "ଖ", "ଗ", "ଘ"}, verbs{"ଚ", "ଛ"};
  std::vector<Sentence> sentences;
  std::size_t id = 0;
  for (const auto& n1 : nouns) {
    for (const auto& n2 : nouns) {
      for (const auto& v : verbs) {
        sentences.emplace_back(++id,
                               std::vector<Token>{{n1, "NN"}, {n2, "NN"}, {v, "VM"}},
                               std::vector<Chunk>{{"NP", 0, 2}, {"VGF", 2, 3}});
      }
    }
  }
  return Corpus(std::move(sentences), ilmt_pos_tagset(), ilmt_chunk_tagset());
}

}  // namespace

TEST(Pipeline, FixtureModelTagsExampleSentence) {
  const Strings words{"ଭଲ", "ପିଲାକୁ", "ଖାଦ୍ୟ", "ଦିଅ"};
  EXPECT_EQ(tag_pos(fixture_parser().pos_model(), words), (Strings{"JJ", "NN", "NN", "VM"}));
}

TEST(Pipeline, SingleTokenAndDeterminism) {
  const Strings one{"ଭଲ"};
  EXPECT_EQ(tag_pos(fixture_parser().pos_model(), one).size(), 1u);
  const Strings words{"ସେ", "ଭଲ", "ପିଲା"};
  EXPECT_EQ(tag_pos(fixture_parser().pos_model(), words),
            tag_pos(fixture_parser().pos_model(), words));
}

TEST(Pipeline, ToyChunkerReproducesPattern) {
  const auto model = train_chunk_model(toy_chunk_corpus(), {}, {});
  const Strings words{"ଖ", "ଘ", "ଛ"}, tags{"NN", "NN", "VM"};
  EXPECT_EQ(chunk_bio(model, words, tags), (Strings{"B-NP", "I-NP", "B-VGF"}));
  EXPECT_EQ(chunk(model, words, tags), (std::vector<Chunk>{{"NP", 0, 2}, {"VGF", 2, 3}}));
  const Strings short_tags{"NN", "NN"};
  try {
    chunk(model, words, short_tags);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::length_mismatch);
  }
}

TEST(Pipeline, WrongTaskModelIsRejected) {
  const Strings words{"କ"};
  EXPECT_THROW(tag_pos(fixture_parser().chunk_model(), words), Error);
  EXPECT_THROW(ShallowParser({}, fixture_parser().chunk_model(), fixture_parser().pos_model()),
               Error);
}

TEST(Pipeline, ParseEmptyText) {
  EXPECT_TRUE(parse(fixture_parser(), "").empty());
}

TEST(Pipeline, ParseComposesStages) {
  const std::string raw = "ଭଲ ପିଲାକୁ ଖାଦ୍ୟ ଦିଅ। ସେ ଘରକୁ ଗଲା।";
  const auto corpus = parse(fixture_parser(), raw);
  const auto sentences = tokenize(raw);
  ASSERT_EQ(corpus.size(), sentences.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& s = corpus.sentences()[i];
    EXPECT_EQ(s.id(), i + 1);
    EXPECT_EQ(s.words(), sentences[i].tokens);
    const auto tags = tag_pos(fixture_parser().pos_model(), sentences[i].tokens);
    EXPECT_EQ(s.pos_tags(), tags);
    EXPECT_EQ(s.chunks(), chunk(fixture_parser().chunk_model(), sentences[i].tokens, tags));
  }
}

TEST(Pipeline, FuzzedParseKeepsInvariants) {
  const Strings alphabet{"ଭଲ", "ପିଲାକୁ", "ଖାଦ୍ୟ", "ଦିଅ", "।", ",", "?", " ", " ", "ସେ", "କ", "xyz", "\""};
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    std::string raw;
    const std::size_t n = rng() % 25;
    for (std::size_t i = 0; i < n; ++i) raw += alphabet[rng() % alphabet.size()];
    const auto corpus = parse(fixture_parser(), raw);
    std::size_t tokens = 0;
    for (const auto& ts : tokenize(raw)) tokens += ts.tokens.size();
    EXPECT_EQ(corpus_stats(corpus).tokens, tokens);
    // Re-parsing the serialized result enforces every corpus invariant again.
    EXPECT_EQ(fixtures::parse(serialize_ssf(corpus)), corpus);
    for (const auto& s : corpus.sentences()) EXPECT_TRUE(s.fully_pos_tagged());
  }
}

TEST(Pipeline, TagAndChunkCorpusConserveTokens) {
  const auto& gold = fixtures::fixture50();
  const auto tagged = tag_corpus(fixture_parser().pos_model(), gold);
  const auto chunked = chunk_corpus(fixture_parser().chunk_model(), gold);
  const auto both = pipeline_corpus(fixture_parser().pos_model(), fixture_parser().chunk_model(), gold);
  for (std::size_t i = 0; i < gold.size(); ++i) {
    EXPECT_EQ(tagged.sentences()[i].words(), gold.sentences()[i].words());
    EXPECT_EQ(tagged.sentences()[i].chunks(), gold.sentences()[i].chunks());
    EXPECT_EQ(chunked.sentences()[i].tokens(), gold.sentences()[i].tokens());
    EXPECT_EQ(both.sentences()[i].words(), gold.sentences()[i].words());
  }
}

TEST(Pipeline, RechunkingFromGoldReproducesTrainingChunks) {
  const auto& gold = fixtures::fixture50();
  const auto chunked = chunk_corpus(fixture_parser().chunk_model(), gold);
  EXPECT_GE(eval_chunks(gold, chunked).f1, 0.95);
}

TEST(Pipeline, CorpusWithoutChunksCannotTrainChunker) {
  const Corpus pos_only({Sentence(1, {{"କ", "NN"}, {"ଖ", "VM"}})}, ilmt_pos_tagset(),
                        ilmt_chunk_tagset());
  try {
    train_chunk_model(pos_only, {}, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::empty_training_set);
  }
  EXPECT_NO_THROW(train_pos_model(pos_only, {}, {}));
  const Corpus untagged({Sentence(1, {{"କ", std::nullopt}})}, ilmt_pos_tagset(),
                        ilmt_chunk_tagset());
  EXPECT_THROW(train_pos_model(untagged, {}, {}), Error);
}

TEST(Pipeline, RetrainIsIdentical) {
  const auto a = train_pipeline(fixtures::fixture50(), {}, {}, {});
  EXPECT_EQ(a.pos_model(), fixture_parser().pos_model());
  EXPECT_EQ(a.chunk_model(), fixture_parser().chunk_model());
}

TEST(Pipeline, PredictedPosDoesNotBeatGoldPosOnSynthetic) {
  const auto corpus = synthetic::make_corpus({300, 9});
  const auto [train, test] = split_corpus(corpus, 200);
  const auto noisy = synthetic::inject_pos_noise(train, 0.15, 1);
  const auto pos_model = train_pos_model(noisy, {}, {});
  const auto chunk_model = train_chunk_model(train, {}, {});
  const double gold_f1 = eval_chunks(test, chunk_corpus(chunk_model, test)).f1;
  const double pipe_f1 = eval_chunks(test, pipeline_corpus(pos_model, chunk_model, test)).f1;
  EXPECT_LE(pipe_f1, gold_f1);
}

TEST(SyntheticCorpus, NoiseTouchesRequestedFraction) {
  const auto corpus = synthetic::make_corpus({100, 2});
  const auto noisy = synthetic::inject_pos_noise(corpus, 0.15, 4);
  std::size_t changed = 0, total = 0;
  for (std::size_t s = 0; s < corpus.size(); ++s) {
    const auto a = corpus.sentences()[s].pos_tags(), b = noisy.sentences()[s].pos_tags();
    for (std::size_t i = 0; i < a.size(); ++i) {
      changed += a[i] != b[i];
      ++total;
    }
  }
  EXPECT_EQ(changed, static_cast<std::size_t>(std::llround(0.15 * static_cast<double>(total))));
  EXPECT_EQ(synthetic::inject_pos_noise(corpus, 0.0, 4), corpus);
}
