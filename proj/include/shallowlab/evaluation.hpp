#pragma once

// POS and chunk scoring, confusion reporting, and Fleiss' kappa.
//
// POS headline scores are macro averages over labels that occur in the gold
// or the predicted column; token accuracy is reported alongside. Chunk scores
// count a predicted chunk as correct only when label and exact token span
// match a gold chunk (micro over the corpus). Any ratio with a zero
// denominator is 0 and the label is flagged.

#include <algorithm>
#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "shallowlab/error.hpp"
#include "shallowlab/features.hpp"
#include "shallowlab/io.hpp"
#include "shallowlab/ssf.hpp"
#include "shallowlab/unicode.hpp"

namespace shallowlab {

struct LabelScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;    // gold count
  std::size_t predicted = 0;
  std::size_t correct = 0;
  bool flagged = false;       // a zero denominator occurred
};

struct EvalReport {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double accuracy = 0.0;
  std::size_t tokens = 0;
  std::size_t gold_items = 0;       // gold tokens (POS) or gold chunks
  std::size_t predicted_items = 0;
  std::size_t correct_items = 0;
  std::map<std::string, LabelScore> per_label;
};

inline double safe_ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

inline double harmonic_f1(double p, double r) {
  return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

inline LabelScore finish_label(std::size_t correct, std::size_t predicted, std::size_t support) {
  LabelScore s;
  s.correct = correct;
  s.predicted = predicted;
  s.support = support;
  s.precision = safe_ratio(correct, predicted);
  s.recall = safe_ratio(correct, support);
  s.f1 = harmonic_f1(s.precision, s.recall);
  s.flagged = predicted == 0 || support == 0;
  return s;
}

class ConfusionMatrix {
 public:
  void add(const std::string& gold, const std::string& predicted, std::size_t count = 1) {
    counts_[{gold, predicted}] += count;
  }
  std::size_t at(const std::string& gold, const std::string& predicted) const {
    const auto it = counts_.find({gold, predicted});
    return it == counts_.end() ? 0 : it->second;
  }
  std::size_t total() const {
    std::size_t n = 0;
    for (const auto& [_, c] : counts_) n += c;
    return n;
  }
  std::size_t row_sum(const std::string& gold) const {
    std::size_t n = 0;
    for (const auto& [key, c] : counts_) {
      if (key.first == gold) n += c;
    }
    return n;
  }
  const std::map<std::pair<std::string, std::string>, std::size_t>& counts() const {
    return counts_;
  }

 private:
  std::map<std::pair<std::string, std::string>, std::size_t> counts_;
};

/// Token-level scoring of two aligned label columns.
inline EvalReport score_labels(std::span<const std::string> gold,
                               std::span<const std::string> predicted,
                               ConfusionMatrix* confusion = nullptr) {
  if (gold.size() != predicted.size()) {
    throw Error(ErrorKind::length_mismatch, "gold and predicted columns differ in length");
  }
  std::map<std::string, std::size_t> gold_counts, pred_counts, correct_counts;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    ++gold_counts[gold[i]];
    ++pred_counts[predicted[i]];
    if (gold[i] == predicted[i]) {
      ++correct;
      ++correct_counts[gold[i]];
    }
    if (confusion) confusion->add(gold[i], predicted[i]);
  }
  std::set<std::string> labels;
  for (const auto& [l, _] : gold_counts) labels.insert(l);
  for (const auto& [l, _] : pred_counts) labels.insert(l);

  EvalReport report;
  report.tokens = gold.size();
  report.gold_items = gold.size();
  report.predicted_items = predicted.size();
  report.correct_items = correct;
  report.accuracy = safe_ratio(correct, gold.size());
  for (const auto& label : labels) {
    const auto s = finish_label(correct_counts[label], pred_counts[label], gold_counts[label]);
    report.precision += s.precision;
    report.recall += s.recall;
    report.f1 += s.f1;
    report.per_label.emplace(label, s);
  }
  if (!labels.empty()) {
    const auto n = static_cast<double>(labels.size());
    report.precision /= n;
    report.recall /= n;
    report.f1 /= n;
  }
  return report;
}

namespace eval_detail {

inline void require_aligned(const Corpus& gold, const Corpus& predicted) {
  const auto& g = gold.sentences();
  const auto& p = predicted.sentences();
  const std::size_t n = std::min(g.size(), p.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (g[i].words() != p[i].words()) {
      throw Error(ErrorKind::token_mismatch,
                  "token sequences differ in sentence " + std::to_string(g[i].id()) +
                      " (predicted sentence " + std::to_string(p[i].id()) + ")");
    }
  }
  if (g.size() != p.size()) {
    const auto& extra = g.size() > n ? g[n] : p[n];
    throw Error(ErrorKind::token_mismatch,
                "sentence counts differ (" + std::to_string(g.size()) + " gold, " +
                    std::to_string(p.size()) + " predicted); first unmatched sentence " +
                    std::to_string(extra.id()));
  }
}

}  // namespace eval_detail

struct PosEvaluation {
  EvalReport report;
  ConfusionMatrix confusion;
};

inline PosEvaluation eval_pos(const Corpus& gold, const Corpus& predicted) {
  eval_detail::require_aligned(gold, predicted);
  std::vector<std::string> g, p;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const auto gt = gold.sentences()[i].pos_tags();
    const auto pt = predicted.sentences()[i].pos_tags();
    g.insert(g.end(), gt.begin(), gt.end());
    p.insert(p.end(), pt.begin(), pt.end());
  }
  PosEvaluation out;
  out.report = score_labels(g, p, &out.confusion);
  return out;
}

/// Exact span + label chunk scoring. accuracy is per-token BIO accuracy.
inline EvalReport eval_chunks(const Corpus& gold, const Corpus& predicted) {
  eval_detail::require_aligned(gold, predicted);
  using Span = std::tuple<std::size_t, std::size_t, std::size_t>;  // sentence, begin, end
  std::map<std::string, std::set<Span>> gold_spans, pred_spans;
  std::size_t tokens = 0, bio_correct = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const auto& gs = gold.sentences()[i];
    const auto& ps = predicted.sentences()[i];
    for (const auto& c : gs.chunks()) gold_spans[c.label].insert({i, c.begin, c.end});
    for (const auto& c : ps.chunks()) pred_spans[c.label].insert({i, c.begin, c.end});
    const auto gb = chunks_to_bio(gs);
    const auto pb = chunks_to_bio(ps);
    tokens += gb.size();
    for (std::size_t t = 0; t < gb.size(); ++t) bio_correct += gb[t] == pb[t];
  }
  std::set<std::string> labels;
  for (const auto& [l, _] : gold_spans) labels.insert(l);
  for (const auto& [l, _] : pred_spans) labels.insert(l);

  EvalReport report;
  report.tokens = tokens;
  report.accuracy = safe_ratio(bio_correct, tokens);
  for (const auto& label : labels) {
    const auto& gset = gold_spans[label];
    const auto& pset = pred_spans[label];
    std::size_t correct = 0;
    for (const auto& s : pset) correct += gset.count(s);
    report.per_label.emplace(label, finish_label(correct, pset.size(), gset.size()));
    report.gold_items += gset.size();
    report.predicted_items += pset.size();
    report.correct_items += correct;
  }
  report.precision = safe_ratio(report.correct_items, report.predicted_items);
  report.recall = safe_ratio(report.correct_items, report.gold_items);
  report.f1 = harmonic_f1(report.precision, report.recall);
  return report;
}

/// Per-token BIO scoring of chunk annotations (macro, like eval_pos).
inline EvalReport eval_chunks_bio(const Corpus& gold, const Corpus& predicted) {
  eval_detail::require_aligned(gold, predicted);
  std::vector<std::string> g, p;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const auto gb = chunks_to_bio(gold.sentences()[i]);
    const auto pb = chunks_to_bio(predicted.sentences()[i]);
    g.insert(g.end(), gb.begin(), gb.end());
    p.insert(p.end(), pb.begin(), pb.end());
  }
  return score_labels(g, p);
}

/// Chunk scoring where a predicted chunk also needs every token's POS tag to
/// be correct. Used as the joint shallow-parsing score.
inline EvalReport eval_joint(const Corpus& gold, const Corpus& predicted) {
  eval_detail::require_aligned(gold, predicted);
  EvalReport report;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const auto& gs = gold.sentences()[i];
    const auto& ps = predicted.sentences()[i];
    const auto& gc = gs.chunks();
    report.tokens += gs.size();
    report.gold_items += gc.size();
    report.predicted_items += ps.chunks().size();
    for (const auto& c : ps.chunks()) {
      if (std::find(gc.begin(), gc.end(), c) == gc.end()) continue;
      bool tags_ok = true;
      for (std::size_t t = c.begin; t < c.end; ++t) {
        tags_ok = tags_ok && gs.tokens()[t].pos == ps.tokens()[t].pos;
      }
      report.correct_items += tags_ok;
    }
  }
  report.precision = safe_ratio(report.correct_items, report.predicted_items);
  report.recall = safe_ratio(report.correct_items, report.gold_items);
  report.f1 = harmonic_f1(report.precision, report.recall);
  return report;
}

struct Confusion {
  std::string gold;
  std::string predicted;
  std::size_t count;
  friend bool operator==(const Confusion&, const Confusion&) = default;
};

/// Off-diagonal cells, largest first; ties ordered by (gold, predicted).
inline std::vector<Confusion> confusion_report(const ConfusionMatrix& cm, std::size_t top_k) {
  if (top_k == 0) throw Error(ErrorKind::invalid_argument, "topK must be at least 1");
  std::vector<Confusion> cells;
  for (const auto& [key, count] : cm.counts()) {
    if (key.first != key.second && count > 0) cells.push_back({key.first, key.second, count});
  }
  std::stable_sort(cells.begin(), cells.end(), [](const Confusion& a, const Confusion& b) {
    if (a.count != b.count) return a.count > b.count;
    return std::tie(a.gold, a.predicted) < std::tie(b.gold, b.predicted);
  });
  if (cells.size() > top_k) cells.resize(top_k);
  return cells;
}

// ---- inter-annotator agreement ---------------------------------------------

struct AgreementReport {
  double kappa = 0.0;
  double observed_agreement = 0.0;
  double expected_agreement = 0.0;
  std::size_t raters = 0;
  std::size_t items = 0;
  std::map<std::string, double> category_proportions;
};

/// Fleiss' kappa over an items x raters matrix of category labels.
inline AgreementReport fleiss_kappa(const std::vector<std::vector<std::string>>& ratings) {
  if (ratings.empty()) throw Error(ErrorKind::malformed_input, "no items to rate");
  const std::size_t n = ratings.front().size();
  if (n < 2) {
    throw Error(ErrorKind::insufficient_raters,
                "need at least 2 raters, got " + std::to_string(n));
  }
  std::map<std::string, std::size_t> totals;
  double sum_pi = 0.0;
  for (std::size_t i = 0; i < ratings.size(); ++i) {
    const auto& row = ratings[i];
    if (row.size() != n) {
      throw Error(ErrorKind::malformed_input,
                  "item " + std::to_string(i + 1) + " has " + std::to_string(row.size()) +
                      " ratings, expected " + std::to_string(n));
    }
    std::map<std::string, std::size_t> counts;
    for (const auto& label : row) {
      if (label.empty()) {
        throw Error(ErrorKind::malformed_input, "item " + std::to_string(i + 1) + " has an empty rating");
      }
      ++counts[label];
      ++totals[label];
    }
    std::size_t agreeing_pairs = 0;
    for (const auto& [_, c] : counts) agreeing_pairs += c * (c - 1);
    sum_pi += static_cast<double>(agreeing_pairs) / static_cast<double>(n * (n - 1));
  }
  AgreementReport report;
  report.raters = n;
  report.items = ratings.size();
  report.observed_agreement = sum_pi / static_cast<double>(ratings.size());
  const double all = static_cast<double>(n * ratings.size());
  for (const auto& [label, c] : totals) {
    const double p = static_cast<double>(c) / all;
    report.category_proportions[label] = p;
    report.expected_agreement += p * p;
  }
  if (report.expected_agreement >= 1.0) {
    if (report.observed_agreement < 1.0) {
      throw Error(ErrorKind::degenerate_case,
                  "expected agreement is 1 but observed agreement is not; kappa undefined");
    }
    report.kappa = 1.0;
    return report;
  }
  report.kappa = (report.observed_agreement - report.expected_agreement) /
                 (1.0 - report.expected_agreement);
  return report;
}

/// Ratings TSV: one item per row, one rater per column; blank lines skipped.
inline std::vector<std::vector<std::string>> parse_ratings_tsv(std::string_view text) {
  unicode::require_valid_utf8(text, "ratings");
  const std::string normalized = unicode::to_nfc(text);
  std::vector<std::vector<std::string>> rows;
  const auto lines = io::split_lines(normalized);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (io::trim(lines[i]).empty()) continue;
    std::vector<std::string> row;
    for (auto cell : io::split(lines[i], '\t')) {
      cell = io::trim(cell);
      if (cell.empty()) {
        throw Error(ErrorKind::malformed_input, "empty rating cell", {i + 1, 1});
      }
      row.emplace_back(cell);
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw Error(ErrorKind::malformed_input,
                  "row has " + std::to_string(row.size()) + " ratings, expected " +
                      std::to_string(rows.front().size()),
                  {i + 1, 1});
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace shallowlab
