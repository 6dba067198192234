#pragma once

#include <filesystem>
#include <string>

#include "shallowlab/io.hpp"
#include "shallowlab/ssf.hpp"
#include "shallowlab/tagset.hpp"

namespace fixtures {

inline std::filesystem::path data_dir() { return SHALLOWLAB_TEST_DATA; }
inline std::filesystem::path samples_dir() { return SHALLOWLAB_SAMPLES; }

inline std::string read(const std::string& name) {
  return shallowlab::io::read_file(data_dir() / name);
}

inline shallowlab::Corpus parse(std::string_view text) {
  return shallowlab::parse_ssf(text, shallowlab::ilmt_pos_tagset(),
                               shallowlab::ilmt_chunk_tagset());
}

inline const shallowlab::Corpus& fixture50() {
  static const shallowlab::Corpus corpus = parse(read("fixture50.ssf"));
  return corpus;
}

/// Fresh scratch directory under the system temp dir, emptied on creation.
inline std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("shallowlab_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace fixtures
