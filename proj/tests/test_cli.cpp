#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "shallowlab/cli.hpp"
#include "shallowlab/io.hpp"
#include "shallowlab/model_io.hpp"
#include "support/fixtures.hpp"

using namespace shallowlab;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST(Cli, UnknownSubcommandIsUsageError) {
  const auto r = invoke({"frobnicate"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("Usage"), std::string::npos);
}

TEST(Cli, NoArgumentsAndMissingOptions) {
  EXPECT_EQ(invoke({}).code, 1);
  EXPECT_EQ(invoke({"train", "--task", "pos"}).code, 1);
  EXPECT_EQ(invoke({"train", "--task", "ner", "--train", "x", "--model", "y"}).code, 1);
  EXPECT_EQ(invoke({"chunk", "--model", "m", "--input", "x"}).code, 1);
}

TEST(Cli, HelpExitsZero) {
  const auto r = invoke({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("experiment"), std::string::npos);
}

TEST(Cli, MissingInputFileIsRuntimeError) {
  const auto dir = fixtures::scratch("cli_missing");
  const auto r = invoke({"stats", "--input", (dir / "none.ssf").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("none.ssf"), std::string::npos);
}

TEST(Cli, TrainTagChunkParseEval) {
  const auto dir = fixtures::scratch("cli_flow");
  const auto corpus = (fixtures::data_dir() / "fixture50.ssf").string();
  const auto pos_model = (dir / "pos.model").string();
  const auto chunk_model = (dir / "chunk.model").string();

  auto r = invoke({"train", "--task", "pos", "--train", corpus, "--model", pos_model});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(pos_model));
  EXPECT_NO_THROW(load_model_file(pos_model));
  r = invoke({"train", "--task", "chunk", "--train", corpus, "--model", chunk_model});
  ASSERT_EQ(r.code, 0) << r.err;

  const auto tagged = (dir / "tagged.ssf").string();
  r = invoke({"tag", "--model", pos_model, "--input", corpus, "--input-format", "ssf", "--output", tagged});
  ASSERT_EQ(r.code, 0) << r.err;
  r = invoke({"eval", "--task", "pos", "--gold", corpus, "--pred", tagged});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("accuracy"), std::string::npos);

  const auto chunked = (dir / "chunked.ssf").string();
  r = invoke({"chunk", "--model", chunk_model, "--input", corpus, "--gold-pos", "--output", chunked});
  ASSERT_EQ(r.code, 0) << r.err;
  r = invoke({"eval", "--task", "chunk", "--gold", corpus, "--pred", chunked, "--report", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("\"schema\""), std::string::npos);
  r = invoke({"chunk", "--model", chunk_model, "--input", corpus, "--pos-model", pos_model});
  ASSERT_EQ(r.code, 0) << r.err;

  const auto raw = dir / "raw.txt";
  io::write_file_atomic(raw, "ଭଲ ପିଲାକୁ ଖାଦ୍ୟ ଦିଅ। ସେ ଘରକୁ ଗଲା।\n");
  r = invoke({"parse", "--pos-model", pos_model, "--chunk-model", chunk_model, "--input", raw.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto parsed = fixtures::parse(r.out);
  EXPECT_EQ(parsed.size(), 2u);

  r = invoke({"tokenize", "--input", raw.string(), "--output", (dir / "tok.txt").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(io::read_file(dir / "tok.txt"), "ଭଲ ପିଲାକୁ ଖାଦ୍ୟ ଦିଅ ।\nସେ ଘରକୁ ଗଲା ।\n");

  // Using a chunk model where a POS model is expected fails at run time.
  r = invoke({"tag", "--model", chunk_model, "--input", raw.string()});
  EXPECT_EQ(r.code, 2);
}

TEST(Cli, EvalTokenMismatchNamesSentence) {
  const auto dir = fixtures::scratch("cli_mismatch");
  const auto gold = dir / "gold.ssf";
  const auto pred = dir / "pred.ssf";
  io::write_file_atomic(gold,
                        "<Sentence id=\"4\">\n1\tକ\tNN\n</Sentence>\n\n"
                        "<Sentence id=\"9\">\n1\tଖ\tNN\n2\tଗ\tVM\n</Sentence>\n");
  io::write_file_atomic(pred,
                        "<Sentence id=\"4\">\n1\tକ\tNN\n</Sentence>\n\n"
                        "<Sentence id=\"9\">\n1\tଖ\tNN\n2\tଘ\tVM\n</Sentence>\n");
  const auto r = invoke({"eval", "--task", "pos", "--gold", gold.string(), "--pred", pred.string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("TokenMismatch"), std::string::npos);
  EXPECT_NE(r.err.find("sentence 9"), std::string::npos);
}

TEST(Cli, StatsAndKappa) {
  const auto corpus = (fixtures::data_dir() / "fixture50.ssf").string();
  auto r = invoke({"stats", "--input", corpus, "--report", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("\"tokens\": 277"), std::string::npos) << r.out;

  const auto dir = fixtures::scratch("cli_kappa");
  io::write_file_atomic(dir / "r.tsv", "X\tY\nY\tX\nX\tY\nY\tX\n");
  r = invoke({"kappa", "--input", (dir / "r.tsv").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("-1.0000"), std::string::npos) << r.out;
  io::write_file_atomic(dir / "one.tsv", "X\nY\n");
  EXPECT_EQ(invoke({"kappa", "--input", (dir / "one.tsv").string()}).code, 2);
}

TEST(Cli, ExperimentConfigWithoutSplitFailsBeforeWork) {
  const auto dir = fixtures::scratch("cli_nosplit");
  io::write_file_atomic(dir / "exp.conf", "corpus = missing.ssf\n");
  const auto r = invoke({"experiment", "--config", (dir / "exp.conf").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("train_sentences"), std::string::npos);
  io::write_file_atomic(dir / "bad.conf", "corpus = x.ssf\ntrain_sentences = 5\nbogus = 1\n");
  EXPECT_EQ(invoke({"experiment", "--config", (dir / "bad.conf").string()}).code, 1);
}

TEST(Cli, ExperimentIsDeterministicAndWritesAtomically) {
  const auto dir = fixtures::scratch("cli_experiment");
  io::write_file_atomic(dir / "exp.conf",
                        "corpus = " + (fixtures::data_dir() / "fixture50.ssf").string() +
                            "\ntrain_sentences = 40\n");
  const auto out_a = (dir / "a.txt").string(), out_b = (dir / "b.txt").string();
  auto r = invoke({"experiment", "--config", (dir / "exp.conf").string(), "--output", out_a,
                "--model-dir", (dir / "ma").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  r = invoke({"experiment", "--config", (dir / "exp.conf").string(), "--output", out_b,
           "--model-dir", (dir / "mb").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(io::read_file(out_a), io::read_file(out_b));
  EXPECT_EQ(io::read_file(dir / "ma" / "pos.model"), io::read_file(dir / "mb" / "pos.model"));
  EXPECT_EQ(io::read_file(dir / "ma" / "chunk.model"), io::read_file(dir / "mb" / "chunk.model"));
  const auto report = io::read_file(out_a);
  for (const char* row : {"POS Tagging", "Chunking", "Shallow Parsing"}) {
    EXPECT_NE(report.find(row), std::string::npos) << row;
  }
  for (const auto& entry : fs::directory_iterator(dir)) {
    EXPECT_NE(entry.path().extension(), ".tmp") << entry.path();
  }
}
