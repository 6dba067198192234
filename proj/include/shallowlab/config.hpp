#pragma once

// Experiment configuration: a "key = value" text file. '#' starts a comment.
//
//   corpus             path to the annotated SSF corpus (required)
//   train_sentences    number of leading sentences used for training (required)
//   pos_tagset         tagset file (default: bundled ILMT POS)
//   chunk_tagset       tagset file (default: bundled ILMT chunk)
//   prefix_max, suffix_max, window            POS templates (4, 7, 1)
//   chunk_word_window, chunk_pos_window       chunk templates (1, 1)
//   l2_sigma, max_iterations, tolerance, feature_cutoff   (1.0, 200, 1e-5, 0)
//   pos_noise          fraction of training POS tags to corrupt (0)
//   noise_seed         seed for pos_noise (1)
//   report_format      text | json (text)
//
// Relative paths resolve against the config file's directory. Environment
// variables are never consulted.

#include <charconv>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>

#include "shallowlab/crf.hpp"
#include "shallowlab/error.hpp"
#include "shallowlab/features.hpp"
#include "shallowlab/io.hpp"

namespace shallowlab {

struct ExperimentConfig {
  std::string corpus;
  std::optional<std::size_t> train_sentences;
  std::string pos_tagset;
  std::string chunk_tagset;
  PosTemplateConfig pos_template;
  ChunkTemplateConfig chunk_template;
  crf::TrainConfig train;
  double pos_noise = 0.0;
  std::uint64_t noise_seed = 1;
  std::string report_format = "text";
  std::filesystem::path base_dir;  // not echoed

  std::filesystem::path resolve(const std::string& p) const {
    const std::filesystem::path path(p);
    return path.is_absolute() ? path : base_dir / path;
  }
};

namespace config_detail {

/// Shortest text that reads back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ec == std::errc{} ? end : buf);
}

template <class T>
T parse_number(std::string_view key, std::string_view value, std::size_t line) {
  T out{};
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end) {
    throw Error(ErrorKind::invalid_argument,
                "config key '" + std::string(key) + "': bad number '" + std::string(value) + "'",
                {line, 1});
  }
  return out;
}

inline double parse_real(std::string_view key, std::string_view value, std::size_t line) {
  std::istringstream in{std::string(value)};
  in.imbue(std::locale::classic());
  double v = 0.0;
  in >> v;
  if (!in || in.peek() != std::char_traits<char>::eof()) {
    throw Error(ErrorKind::invalid_argument,
                "config key '" + std::string(key) + "': bad number '" + std::string(value) + "'",
                {line, 1});
  }
  return v;
}

}  // namespace config_detail

/// Fully resolved configuration as sorted "key=value" lines.
inline std::string describe(const ExperimentConfig& c) {
  using config_detail::format_double;
  std::map<std::string, std::string> kv{
      {"corpus", c.corpus},
      {"train_sentences", c.train_sentences ? std::to_string(*c.train_sentences) : ""},
      {"pos_tagset", c.pos_tagset.empty() ? "<bundled:ilmt_pos>" : c.pos_tagset},
      {"chunk_tagset", c.chunk_tagset.empty() ? "<bundled:ilmt_chunk>" : c.chunk_tagset},
      {"prefix_max", std::to_string(c.pos_template.prefix_max)},
      {"suffix_max", std::to_string(c.pos_template.suffix_max)},
      {"window", std::to_string(c.pos_template.window)},
      {"chunk_word_window", std::to_string(c.chunk_template.word_window)},
      {"chunk_pos_window", std::to_string(c.chunk_template.pos_window)},
      {"l2_sigma", format_double(c.train.l2_sigma)},
      {"max_iterations", std::to_string(c.train.max_iterations)},
      {"tolerance", format_double(c.train.tolerance)},
      {"feature_cutoff", std::to_string(c.train.feature_cutoff)},
      {"pos_noise", format_double(c.pos_noise)},
      {"noise_seed", std::to_string(c.noise_seed)},
      {"report_format", c.report_format},
  };
  std::string out;
  for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
  return out;
}

/// Parses the config text. Unknown keys, bad values and a missing corpus or
/// train_sentences raise InvalidArgument.
inline ExperimentConfig parse_experiment_config(std::string_view text,
                                                std::filesystem::path base_dir = {}) {
  using config_detail::parse_number;
  using config_detail::parse_real;
  ExperimentConfig c;
  c.base_dir = std::move(base_dir);
  const auto lines = io::split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t line = i + 1;
    auto row = lines[i];
    if (const auto hash = row.find('#'); hash != std::string_view::npos) row = row.substr(0, hash);
    row = io::trim(row);
    if (row.empty()) continue;
    const auto eq = row.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorKind::invalid_argument, "expected 'key = value'", {line, 1});
    }
    const auto key = io::trim(row.substr(0, eq));
    const auto value = io::trim(row.substr(eq + 1));
    if (key == "corpus") c.corpus = value;
    else if (key == "train_sentences") c.train_sentences = parse_number<std::size_t>(key, value, line);
    else if (key == "pos_tagset") c.pos_tagset = value;
    else if (key == "chunk_tagset") c.chunk_tagset = value;
    else if (key == "prefix_max") c.pos_template.prefix_max = parse_number<std::size_t>(key, value, line);
    else if (key == "suffix_max") c.pos_template.suffix_max = parse_number<std::size_t>(key, value, line);
    else if (key == "window") c.pos_template.window = parse_number<std::size_t>(key, value, line);
    else if (key == "chunk_word_window") c.chunk_template.word_window = parse_number<std::size_t>(key, value, line);
    else if (key == "chunk_pos_window") c.chunk_template.pos_window = parse_number<std::size_t>(key, value, line);
    else if (key == "l2_sigma") c.train.l2_sigma = parse_real(key, value, line);
    else if (key == "max_iterations") c.train.max_iterations = parse_number<std::size_t>(key, value, line);
    else if (key == "tolerance") c.train.tolerance = parse_real(key, value, line);
    else if (key == "feature_cutoff") c.train.feature_cutoff = parse_number<std::size_t>(key, value, line);
    else if (key == "pos_noise") c.pos_noise = parse_real(key, value, line);
    else if (key == "noise_seed") c.noise_seed = parse_number<std::uint64_t>(key, value, line);
    else if (key == "report_format") {
      if (value != "text" && value != "json") {
        throw Error(ErrorKind::invalid_argument, "report_format must be text or json", {line, 1});
      }
      c.report_format = value;
    } else {
      throw Error(ErrorKind::invalid_argument, "unknown config key '" + std::string(key) + "'",
                  {line, 1});
    }
  }
  if (c.corpus.empty()) throw Error(ErrorKind::invalid_argument, "config is missing 'corpus'");
  if (!c.train_sentences) {
    throw Error(ErrorKind::invalid_argument, "config is missing 'train_sentences' (split size)");
  }
  if (c.pos_noise < 0.0 || c.pos_noise > 1.0) {
    throw Error(ErrorKind::invalid_argument, "pos_noise must lie in [0, 1]");
  }
  return c;
}

}  // namespace shallowlab
