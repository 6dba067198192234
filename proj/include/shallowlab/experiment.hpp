#pragma once

// End-to-end protocol: split, train the tagger, train the chunker on gold POS,
// then score POS tagging, gold-POS chunking and the full pipeline.

#include <filesystem>
#include <string>
#include <utility>

#include <json.hpp>

#include "shallowlab/config.hpp"
#include "shallowlab/evaluation.hpp"
#include "shallowlab/model.hpp"
#include "shallowlab/pipeline.hpp"
#include "shallowlab/report.hpp"
#include "shallowlab/ssf.hpp"
#include "shallowlab/synthetic.hpp"

namespace shallowlab {

struct ExperimentResult {
  CorpusStats train_stats;
  CorpusStats test_stats;
  EvalReport pos;
  EvalReport chunk_gold_pos;
  EvalReport pipeline;
  EvalReport joint;
  CrfModel pos_model;
  CrfModel chunk_model;
};

namespace experiment_detail {

template <class Fn>
auto stage(std::string_view name, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.kind(), "stage '" + std::string(name) + "': " + e.detail(), e.where());
  }
}

}  // namespace experiment_detail

inline ExperimentResult run_experiment(const ExperimentConfig& cfg, const Corpus& corpus) {
  using experiment_detail::stage;
  const std::string provenance = describe(cfg);
  auto [train_set, test_set] =
      stage("split", [&] { return split_corpus(corpus, cfg.train_sentences.value_or(0)); });
  if (cfg.pos_noise > 0.0) {
    train_set = synthetic::inject_pos_noise(train_set, cfg.pos_noise, cfg.noise_seed);
  }

  ExperimentResult r;
  r.train_stats = corpus_stats(train_set);
  r.test_stats = corpus_stats(test_set);
  r.pos_model = stage("train-pos", [&] {
    return train_pos_model(train_set, cfg.pos_template, cfg.train, provenance);
  });
  r.chunk_model = stage("train-chunk", [&] {
    return train_chunk_model(train_set, cfg.chunk_template, cfg.train, provenance);
  });

  const Corpus tagged = stage("tag", [&] { return tag_corpus(r.pos_model, test_set); });
  r.pos = stage("eval-pos", [&] { return eval_pos(test_set, tagged).report; });
  const Corpus gold_chunked = stage("chunk-gold-pos", [&] { return chunk_corpus(r.chunk_model, test_set); });
  r.chunk_gold_pos = stage("eval-chunk", [&] { return eval_chunks(test_set, gold_chunked); });
  const Corpus parsed = stage("pipeline", [&] { return chunk_corpus(r.chunk_model, tagged); });
  r.pipeline = stage("eval-pipeline", [&] { return eval_chunks(test_set, parsed); });
  r.joint = stage("eval-joint", [&] { return eval_joint(test_set, parsed); });
  return r;
}

/// Loads the corpus named by the config (tagsets per config) and runs it.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  const TagSet pos = cfg.pos_tagset.empty() ? ilmt_pos_tagset() : TagSet::load(cfg.resolve(cfg.pos_tagset));
  const TagSet chunk =
      cfg.chunk_tagset.empty() ? ilmt_chunk_tagset() : TagSet::load(cfg.resolve(cfg.chunk_tagset));
  const Corpus corpus = experiment_detail::stage("load", [&] {
    return parse_ssf(io::read_file(cfg.resolve(cfg.corpus)), pos, chunk);
  });
  return run_experiment(cfg, corpus);
}

inline std::string experiment_report(const ExperimentConfig& cfg, const ExperimentResult& r) {
  using report::fixed;
  if (cfg.report_format == "json") {
    const auto row = [](std::string_view name, const EvalReport& e) {
      return nlohmann::json{{"model", name}, {"precision", e.precision}, {"recall", e.recall},
                            {"f1", e.f1}, {"accuracy", e.accuracy}};
    };
    std::map<std::string, std::string> config;
    const std::string described = describe(cfg);
    for (auto line : io::split_lines(described)) {
      const auto eq = line.find('=');
      config[std::string(line.substr(0, eq))] = std::string(line.substr(eq + 1));
    }
    nlohmann::json j{
        {"schema", "shallowlab.experiment"},
        {"schema_version", report::kSchemaVersion},
        {"config", config},
        {"train", {{"sentences", r.train_stats.sentences}, {"tokens", r.train_stats.tokens}}},
        {"test", {{"sentences", r.test_stats.sentences}, {"tokens", r.test_stats.tokens}}},
        {"rows",
         {row("POS Tagging", r.pos), row("Chunking", r.chunk_gold_pos),
          row("Shallow Parsing", r.pipeline)}},
        {"joint_shallow_parsing", report::to_json(r.joint)},
        {"pos_iterations", r.pos_model.metadata().iterations},
        {"chunk_iterations", r.chunk_model.metadata().iterations}};
    return j.dump(2) + "\n";
  }
  std::string out = "shallowlab experiment report (schema " +
                    std::to_string(report::kSchemaVersion) + ")\n\nconfig:\n";
  const std::string described = describe(cfg);
  for (auto line : io::split_lines(described)) out += "  " + std::string(line) + "\n";
  out += "\ntrain: " + std::to_string(r.train_stats.sentences) + " sentences, " +
         std::to_string(r.train_stats.tokens) + " tokens\n";
  out += "test:  " + std::to_string(r.test_stats.sentences) + " sentences, " +
         std::to_string(r.test_stats.tokens) + " tokens\n\n";
  char line[160];
  std::snprintf(line, sizeof line, "%-18s %8s %8s %8s\n", "Model", "P", "R", "F1");
  out += line;
  for (const auto& [name, e] : {std::pair<const char*, const EvalReport*>{"POS Tagging", &r.pos},
                                {"Chunking", &r.chunk_gold_pos},
                                {"Shallow Parsing", &r.pipeline}}) {
    std::snprintf(line, sizeof line, "%-18s %8s %8s %8s\n", name, fixed(e->precision).c_str(),
                  fixed(e->recall).c_str(), fixed(e->f1).c_str());
    out += line;
  }
  out += "\nPOS token accuracy: " + fixed(r.pos.accuracy) + "\n";
  out += "Chunking uses gold POS; Shallow Parsing uses predicted POS.\n";
  out += "Joint shallow parsing (chunk span + label + all POS correct) F1: " + fixed(r.joint.f1) + "\n";
  out += "optimizer iterations: pos " + std::to_string(r.pos_model.metadata().iterations) +
         ", chunk " + std::to_string(r.chunk_model.metadata().iterations) + "\n";
  return out;
}

}  // namespace shallowlab
