#pragma once

// Text and JSON renderings of evaluation, agreement and corpus reports.
// JSON reports carry "schema" and "schema_version"; see README for fields.

#include <cstdio>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "shallowlab/evaluation.hpp"
#include "shallowlab/ssf.hpp"

namespace shallowlab::report {

inline constexpr int kSchemaVersion = 1;

inline std::string fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

inline nlohmann::json to_json(const EvalReport& r) {
  nlohmann::json labels = nlohmann::json::object();
  nlohmann::json flagged = nlohmann::json::array();
  for (const auto& [label, s] : r.per_label) {
    labels[label] = {{"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1},
                     {"support", s.support},     {"predicted", s.predicted},
                     {"correct", s.correct},     {"flagged", s.flagged}};
    if (s.flagged) flagged.push_back(label);
  }
  return {{"precision", r.precision},
          {"recall", r.recall},
          {"f1", r.f1},
          {"accuracy", r.accuracy},
          {"tokens", r.tokens},
          {"gold_items", r.gold_items},
          {"predicted_items", r.predicted_items},
          {"correct_items", r.correct_items},
          {"labels", labels},
          {"flagged_labels", flagged}};
}

inline nlohmann::json to_json(const std::vector<Confusion>& cells) {
  auto out = nlohmann::json::array();
  for (const auto& c : cells) {
    out.push_back({{"gold", c.gold}, {"predicted", c.predicted}, {"count", c.count}});
  }
  return out;
}

/// JSON evaluation report. `config` echoes the resolved invocation.
inline std::string eval_json(const EvalReport& r, std::string_view task, std::string_view metric,
                             const std::map<std::string, std::string>& config,
                             const std::vector<Confusion>& confusions = {}) {
  auto j = to_json(r);
  j["schema"] = "shallowlab.eval";
  j["schema_version"] = kSchemaVersion;
  j["task"] = task;
  j["metric"] = metric;
  j["config"] = config;
  if (task == "pos") j["top_confusions"] = to_json(confusions);
  return j.dump(2) + "\n";
}

inline std::string eval_text(const EvalReport& r, std::string_view task, std::string_view metric,
                             const std::vector<Confusion>& confusions = {}) {
  std::string out;
  out += "task: " + std::string(task) + "  metric: " + std::string(metric) + "\n";
  out += "precision " + fixed(r.precision) + "  recall " + fixed(r.recall) + "  f1 " +
         fixed(r.f1) + "  accuracy " + fixed(r.accuracy) + "\n";
  out += "tokens " + std::to_string(r.tokens) + "  gold " + std::to_string(r.gold_items) +
         "  predicted " + std::to_string(r.predicted_items) + "  correct " +
         std::to_string(r.correct_items) + "\n\n";
  char line[256];
  std::snprintf(line, sizeof line, "%-12s %9s %9s %9s %8s %8s\n", "label", "precision", "recall",
                "f1", "support", "pred");
  out += line;
  for (const auto& [label, s] : r.per_label) {
    std::snprintf(line, sizeof line, "%-12s %9s %9s %9s %8zu %8zu%s\n", label.c_str(),
                  fixed(s.precision).c_str(), fixed(s.recall).c_str(), fixed(s.f1).c_str(),
                  s.support, s.predicted, s.flagged ? "  *" : "");
    out += line;
  }
  if (!confusions.empty()) {
    out += "\ntop confusions (gold -> predicted):\n";
    for (const auto& c : confusions) {
      out += "  " + c.gold + " -> " + c.predicted + "  " + std::to_string(c.count) + "\n";
    }
  }
  return out;
}

inline std::string kappa_json(const AgreementReport& a, const std::map<std::string, std::string>& config) {
  nlohmann::json j{{"schema", "shallowlab.kappa"},
                   {"schema_version", kSchemaVersion},
                   {"kappa", a.kappa},
                   {"observed_agreement", a.observed_agreement},
                   {"expected_agreement", a.expected_agreement},
                   {"raters", a.raters},
                   {"items", a.items},
                   {"category_proportions", a.category_proportions},
                   {"config", config}};
  return j.dump(2) + "\n";
}

inline std::string kappa_text(const AgreementReport& a) {
  return "fleiss kappa " + fixed(a.kappa, 6) + "\nobserved agreement " +
         fixed(a.observed_agreement, 6) + "\nexpected agreement " +
         fixed(a.expected_agreement, 6) + "\nraters " + std::to_string(a.raters) + "  items " +
         std::to_string(a.items) + "\n";
}

inline std::string stats_text(const CorpusStats& s) {
  std::string out = "sentences " + std::to_string(s.sentences) + "\ntokens " +
                    std::to_string(s.tokens) + "\nchunks " + std::to_string(s.chunks) +
                    "\nuntagged_tokens " + std::to_string(s.untagged_tokens) +
                    "\nunchunked_tokens " + std::to_string(s.unchunked_tokens) + "\n";
  for (const auto& [label, n] : s.pos_counts) out += "pos\t" + label + "\t" + std::to_string(n) + "\n";
  for (const auto& [label, n] : s.chunk_counts) out += "chunk\t" + label + "\t" + std::to_string(n) + "\n";
  return out;
}

inline std::string stats_json(const CorpusStats& s) {
  nlohmann::json j{{"schema", "shallowlab.stats"},
                   {"schema_version", kSchemaVersion},
                   {"sentences", s.sentences},
                   {"tokens", s.tokens},
                   {"chunks", s.chunks},
                   {"untagged_tokens", s.untagged_tokens},
                   {"unchunked_tokens", s.unchunked_tokens},
                   {"pos_counts", s.pos_counts},
                   {"chunk_counts", s.chunk_counts}};
  return j.dump(2) + "\n";
}

}  // namespace shallowlab::report
