#pragma once

// The `shallowlab` command line. Exit codes: 0 success, 1 usage error
// (message and usage on stderr), 2 data or model error.

#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "shallowlab/config.hpp"
#include "shallowlab/error.hpp"
#include "shallowlab/evaluation.hpp"
#include "shallowlab/experiment.hpp"
#include "shallowlab/io.hpp"
#include "shallowlab/model_io.hpp"
#include "shallowlab/pipeline.hpp"
#include "shallowlab/report.hpp"
#include "shallowlab/ssf.hpp"
#include "shallowlab/tokenizer.hpp"

namespace shallowlab::cli {

/// Raised for invocation problems detected after argument parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string task;
  std::string input, output, train, model, pos_model, chunk_model, gold, pred, config;
  std::string abbrev, pos_tagset, chunk_tagset, model_dir;
  std::string report = "text";
  std::string input_format = "raw";
  std::string metric = "span";
  bool gold_pos = false;
  std::size_t top_k = 10;
  PosTemplateConfig pos_template;
  ChunkTemplateConfig chunk_template;
  crf::TrainConfig train_cfg;
};

namespace detail {

template <class Fn>
auto with_file(const std::string& path, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.kind(), path + ": " + e.detail(), e.where());
  }
}

inline TagSet pos_tagset(const Options& o) {
  return o.pos_tagset.empty() ? ilmt_pos_tagset() : TagSet::load(o.pos_tagset);
}
inline TagSet chunk_tagset(const Options& o) {
  return o.chunk_tagset.empty() ? ilmt_chunk_tagset() : TagSet::load(o.chunk_tagset);
}

inline Corpus load_corpus(const std::string& path, const Options& o) {
  const auto pos = pos_tagset(o);
  const auto chunk = chunk_tagset(o);
  return with_file(path, [&] { return parse_ssf(io::read_file(path), pos, chunk); });
}

inline TokenizerConfig tokenizer_config(const Options& o) {
  if (o.abbrev.empty()) return {};
  return with_file(o.abbrev, [&] { return TokenizerConfig::load_abbreviations(o.abbrev); });
}

inline CrfModel load_model(const std::string& path) { return load_model_file(path); }

inline Corpus tokenized_corpus(const std::string& raw, const TokenizerConfig& tok, const Options& o) {
  std::vector<Sentence> sentences;
  std::size_t id = 0;
  for (const auto& ts : tokenize(raw, tok)) {
    std::vector<Token> tokens;
    for (const auto& t : ts.tokens) tokens.push_back({t, std::nullopt});
    sentences.emplace_back(++id, std::move(tokens));
  }
  return Corpus(std::move(sentences), pos_tagset(o), chunk_tagset(o));
}

inline void emit(const std::string& path, const std::string& data, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << data;
  } else {
    io::write_file_atomic(path, data);
  }
}

inline std::string train_provenance(const Options& o) {
  std::map<std::string, std::string> kv{
      {"task", o.task},
      {"train", o.train},
      {"pos_tagset", o.pos_tagset.empty() ? "<bundled:ilmt_pos>" : o.pos_tagset},
      {"chunk_tagset", o.chunk_tagset.empty() ? "<bundled:ilmt_chunk>" : o.chunk_tagset},
      {"prefix_max", std::to_string(o.pos_template.prefix_max)},
      {"suffix_max", std::to_string(o.pos_template.suffix_max)},
      {"window", std::to_string(o.pos_template.window)},
      {"chunk_word_window", std::to_string(o.chunk_template.word_window)},
      {"chunk_pos_window", std::to_string(o.chunk_template.pos_window)},
      {"l2_sigma", config_detail::format_double(o.train_cfg.l2_sigma)},
      {"max_iterations", std::to_string(o.train_cfg.max_iterations)},
      {"tolerance", config_detail::format_double(o.train_cfg.tolerance)},
      {"feature_cutoff", std::to_string(o.train_cfg.feature_cutoff)},
  };
  std::string out;
  for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
  return out;
}

// ---- subcommands -----------------------------------------------------------

inline void run_tokenize(const Options& o, std::ostream& out) {
  const auto tok = tokenizer_config(o);
  const auto raw = io::read_file(o.input);
  const auto sentences = with_file(o.input, [&] { return tokenize(raw, tok); });
  std::string text;
  for (const auto& s : sentences) {
    for (std::size_t i = 0; i < s.tokens.size(); ++i) {
      if (i) text += ' ';
      text += s.tokens[i];
    }
    text += '\n';
  }
  emit(o.output, text, out);
}

inline void run_train(const Options& o, std::ostream& out) {
  const Corpus corpus = load_corpus(o.train, o);
  const auto provenance = train_provenance(o);
  const CrfModel model =
      o.task == "pos" ? train_pos_model(corpus, o.pos_template, o.train_cfg, provenance)
                      : train_chunk_model(corpus, o.chunk_template, o.train_cfg, provenance);
  save_model_file(model, o.model);
  out << "trained " << o.task << " model: " << model.labels().size() << " labels, "
      << model.features().size() << " features, " << model.metadata().iterations
      << " iterations, objective " << report::fixed(model.metadata().final_objective, 6) << "\n";
}

inline void run_tag(const Options& o, std::ostream& out) {
  const CrfModel model = load_model(o.model);
  Corpus input = o.input_format == "ssf"
                     ? load_corpus(o.input, o)
                     : with_file(o.input, [&] {
                         return tokenized_corpus(io::read_file(o.input), tokenizer_config(o), o);
                       });
  emit(o.output, serialize_ssf(tag_corpus(model, input)), out);
}

inline void run_chunk(const Options& o, std::ostream& out) {
  const CrfModel chunk_model = load_model(o.model);
  Corpus input = load_corpus(o.input, o);
  if (!o.gold_pos) input = tag_corpus(load_model(o.pos_model), input);
  const Corpus chunked = with_file(o.input, [&] { return chunk_corpus(chunk_model, input); });
  emit(o.output, serialize_ssf(chunked), out);
}

inline void run_parse(const Options& o, std::ostream& out) {
  const ShallowParser parser(tokenizer_config(o), load_model(o.pos_model), load_model(o.chunk_model),
                             pos_tagset(o), chunk_tagset(o));
  const auto raw = io::read_file(o.input);
  const Corpus parsed = with_file(o.input, [&] { return parse(parser, raw); });
  emit(o.output, serialize_ssf(parsed), out);
}

inline void run_eval(const Options& o, std::ostream& out) {
  const Corpus gold = load_corpus(o.gold, o);
  const Corpus pred = load_corpus(o.pred, o);
  const std::map<std::string, std::string> config{
      {"task", o.task}, {"gold", o.gold}, {"pred", o.pred}, {"metric", o.metric}};
  const auto evaluate = [&] {
    if (o.task == "pos") {
      const auto e = eval_pos(gold, pred);
      const auto top = confusion_report(e.confusion, o.top_k);
      return o.report == "json" ? report::eval_json(e.report, "pos", "macro", config, top)
                                : report::eval_text(e.report, "pos", "macro", top);
    }
    const auto r = o.metric == "bio" ? eval_chunks_bio(gold, pred) : eval_chunks(gold, pred);
    return o.report == "json" ? report::eval_json(r, "chunk", o.metric, config)
                              : report::eval_text(r, "chunk", o.metric);
  };
  emit(o.output, with_file(o.pred, evaluate), out);
}

inline void run_kappa(const Options& o, std::ostream& out) {
  const auto a = with_file(o.input, [&] {
    return fleiss_kappa(parse_ratings_tsv(io::read_file(o.input)));
  });
  emit(o.output, o.report == "json" ? report::kappa_json(a, {{"input", o.input}}) : report::kappa_text(a),
       out);
}

inline void run_stats(const Options& o, std::ostream& out) {
  const auto s = corpus_stats(load_corpus(o.input, o));
  emit(o.output, o.report == "json" ? report::stats_json(s) : report::stats_text(s), out);
}

inline void run_experiment_command(const Options& o, std::ostream& out) {
  const auto text = io::read_file(o.config);
  ExperimentConfig cfg;
  try {
    cfg = parse_experiment_config(text, std::filesystem::path(o.config).parent_path());
  } catch (const Error& e) {
    throw UsageError(o.config + ": " + e.what());
  }
  const auto result = with_file(o.config, [&] { return run_experiment(cfg); });
  if (!o.model_dir.empty()) {
    std::filesystem::create_directories(o.model_dir);
    save_model_file(result.pos_model, std::filesystem::path(o.model_dir) / "pos.model");
    save_model_file(result.chunk_model, std::filesystem::path(o.model_dir) / "chunk.model");
  }
  emit(o.output, experiment_report(cfg, result), out);
}

}  // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  Options o;
  CLI::App app{"shallowlab: tokenizer, CRF POS tagger and chunker for SSF corpora", "shallowlab"};
  app.require_subcommand(1);

  const auto add_tagsets = [&](CLI::App* cmd) {
    cmd->add_option("--pos-tagset", o.pos_tagset, "POS tagset file (default: bundled ILMT)");
    cmd->add_option("--chunk-tagset", o.chunk_tagset, "chunk tagset file (default: bundled ILMT)");
  };

  auto* tok = app.add_subcommand("tokenize", "split raw text into sentences and tokens");
  tok->add_option("--input", o.input, "raw UTF-8 text")->required();
  tok->add_option("--output", o.output, "one sentence per line, tokens space-separated")->required();
  tok->add_option("--abbrev", o.abbrev, "abbreviation list");

  auto* train = app.add_subcommand("train", "train a POS or chunk model");
  train->add_option("--task", o.task)->required()->check(CLI::IsMember({"pos", "chunk"}));
  train->add_option("--train", o.train, "training corpus (SSF)")->required();
  train->add_option("--model", o.model, "output model file")->required();
  train->add_option("--prefix-max", o.pos_template.prefix_max, "max prefix length m")->capture_default_str();
  train->add_option("--suffix-max", o.pos_template.suffix_max, "max suffix length n")->capture_default_str();
  train->add_option("--window", o.pos_template.window, "POS word window radius s")->capture_default_str();
  train->add_option("--chunk-word-window", o.chunk_template.word_window, "chunk word window s1")
      ->capture_default_str();
  train->add_option("--chunk-pos-window", o.chunk_template.pos_window, "chunk POS window s2")
      ->capture_default_str();
  train->add_option("--sigma", o.train_cfg.l2_sigma, "Gaussian prior sigma")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  train->add_option("--max-iter", o.train_cfg.max_iterations)->capture_default_str()->check(CLI::PositiveNumber);
  train->add_option("--tol", o.train_cfg.tolerance, "relative objective change")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  train->add_option("--cutoff", o.train_cfg.feature_cutoff, "minimum feature count")->capture_default_str();
  add_tagsets(train);

  auto* tag = app.add_subcommand("tag", "POS-tag raw text or an SSF corpus");
  tag->add_option("--model", o.model, "POS model")->required();
  tag->add_option("--input", o.input)->required();
  tag->add_option("--output", o.output, "SSF output (default stdout)");
  tag->add_option("--input-format", o.input_format)->check(CLI::IsMember({"raw", "ssf"}))->capture_default_str();
  tag->add_option("--abbrev", o.abbrev, "abbreviation list (raw input)");
  add_tagsets(tag);

  auto* chunk = app.add_subcommand("chunk", "chunk an SSF corpus");
  chunk->add_option("--model", o.model, "chunk model")->required();
  chunk->add_option("--input", o.input, "SSF corpus")->required();
  chunk->add_option("--output", o.output, "SSF output (default stdout)");
  chunk->add_flag("--gold-pos", o.gold_pos, "use the POS column of the input instead of the tagger");
  chunk->add_option("--pos-model", o.pos_model, "POS model (required without --gold-pos)");
  add_tagsets(chunk);

  auto* parse_cmd = app.add_subcommand("parse", "tokenize, tag and chunk raw text");
  parse_cmd->add_option("--pos-model", o.pos_model)->required();
  parse_cmd->add_option("--chunk-model", o.chunk_model)->required();
  parse_cmd->add_option("--input", o.input, "raw UTF-8 text")->required();
  parse_cmd->add_option("--output", o.output, "SSF output (default stdout)");
  parse_cmd->add_option("--abbrev", o.abbrev, "abbreviation list");
  add_tagsets(parse_cmd);

  auto* eval = app.add_subcommand("eval", "score predictions against gold annotation");
  eval->add_option("--task", o.task)->required()->check(CLI::IsMember({"pos", "chunk"}));
  eval->add_option("--gold", o.gold)->required();
  eval->add_option("--pred", o.pred)->required();
  eval->add_option("--report", o.report)->check(CLI::IsMember({"text", "json"}))->capture_default_str();
  eval->add_option("--metric", o.metric, "chunk metric: exact spans or per-token BIO")
      ->check(CLI::IsMember({"span", "bio"}))
      ->capture_default_str();
  eval->add_option("--top-k", o.top_k, "confusions listed (pos)")->capture_default_str()->check(CLI::PositiveNumber);
  eval->add_option("--output", o.output, "report file (default stdout)");
  add_tagsets(eval);

  auto* kappa = app.add_subcommand("kappa", "Fleiss' kappa over a ratings TSV");
  kappa->add_option("--input", o.input, "one item per row, one rater per column")->required();
  kappa->add_option("--report", o.report)->check(CLI::IsMember({"text", "json"}))->capture_default_str();
  kappa->add_option("--output", o.output, "report file (default stdout)");

  auto* stats = app.add_subcommand("stats", "corpus statistics");
  stats->add_option("--input", o.input, "SSF corpus")->required();
  stats->add_option("--report", o.report)->check(CLI::IsMember({"text", "json"}))->capture_default_str();
  stats->add_option("--output", o.output, "report file (default stdout)");
  add_tagsets(stats);

  auto* experiment = app.add_subcommand("experiment", "split, train, and evaluate three ways");
  experiment->add_option("--config", o.config, "experiment config file")->required();
  experiment->add_option("--output", o.output, "report file (default stdout)");
  experiment->add_option("--model-dir", o.model_dir, "also write pos.model and chunk.model here");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
    if (chunk->parsed() && !o.gold_pos && o.pos_model.empty()) {
      throw UsageError("chunk: --pos-model is required unless --gold-pos is given");
    }
    if (tok->parsed()) detail::run_tokenize(o, out);
    else if (train->parsed()) detail::run_train(o, out);
    else if (tag->parsed()) detail::run_tag(o, out);
    else if (chunk->parsed()) detail::run_chunk(o, out);
    else if (parse_cmd->parsed()) detail::run_parse(o, out);
    else if (eval->parsed()) detail::run_eval(o, out);
    else if (kappa->parsed()) detail::run_kappa(o, out);
    else if (stats->parsed()) detail::run_stats(o, out);
    else if (experiment->parsed()) detail::run_experiment_command(o, out);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

inline int run(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, out, err);
}

}  // namespace shallowlab::cli
