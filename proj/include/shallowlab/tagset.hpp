#pragma once

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <initializer_list>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "shallowlab/error.hpp"
#include "shallowlab/io.hpp"
#include "shallowlab/unicode.hpp"

namespace shallowlab {

/// An ordered inventory of labels. Labels are unique, non-empty and contain
/// no whitespace.
class TagSet {
 public:
  TagSet() = default;

  TagSet(std::string name, std::vector<std::string> labels)
      : name_(std::move(name)), labels_(std::move(labels)) {
    for (std::size_t i = 0; i < labels_.size(); ++i) {
      const auto& label = labels_[i];
      if (label.empty() || unicode::contains_whitespace(label)) {
        throw Error(ErrorKind::malformed_input,
                    "tagset '" + name_ + "': invalid label '" + label + "'");
      }
      if (!index_.emplace(label, i).second) {
        throw Error(ErrorKind::malformed_input,
                    "tagset '" + name_ + "': duplicate label '" + label + "'");
      }
    }
  }

  TagSet(std::string name, std::initializer_list<std::string_view> labels)
      : TagSet(std::move(name), std::vector<std::string>(labels.begin(),
                                                         labels.end())) {}

  /// Parses the tagset file format: one label per line, '#' starts a comment.
  static TagSet parse(std::string_view text, std::string name) {
    unicode::require_valid_utf8(text, "tagset " + name);
    std::vector<std::string> labels;
    for (auto line : io::split_lines(text)) {
      if (const auto hash = line.find('#'); hash != std::string_view::npos) {
        line = line.substr(0, hash);
      }
      line = io::trim(line);
      if (!line.empty()) labels.push_back(unicode::to_nfc(line));
    }
    return TagSet(std::move(name), std::move(labels));
  }

  static TagSet load(const std::filesystem::path& path) {
    return parse(io::read_file(path), path.stem().string());
  }

  const std::string& name() const noexcept { return name_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  std::size_t size() const noexcept { return labels_.size(); }
  bool contains(std::string_view label) const {
    return index_.find(std::string(label)) != index_.end();
  }

  friend bool operator==(const TagSet& a, const TagSet& b) {
    return a.name_ == b.name_ && a.labels_ == b.labels_;
  }

 private:
  std::string name_;
  std::vector<std::string> labels_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// ILMT part-of-speech inventory (27 labels). Mirrors data/tagsets/ilmt_pos.txt.
inline const TagSet& ilmt_pos_tagset() {
  static const TagSet tags(
      "ilmt_pos",
      {"NN",  "NST", "NNP",  "PRP", "DEM", "VM",  "VAUX", "JJ",  "RB",
       "PSP", "RP",  "CC",   "WQ",  "QF",  "QC",  "QO",   "CL",  "INTF",
       "INJ", "NEG", "UT",   "SYM", "XC",  "RDP", "ECH",  "UNK", "NULL"});
  return tags;
}

/// ILMT chunk inventory (11 labels). Mirrors data/tagsets/ilmt_chunk.txt.
inline const TagSet& ilmt_chunk_tagset() {
  static const TagSet tags("ilmt_chunk",
                           {"NP", "VGF", "VGNF", "VGINF", "VGNN", "JJP", "RBP",
                            "NEGP", "CCP", "FRAGP", "BLK"});
  return tags;
}

}  // namespace shallowlab
