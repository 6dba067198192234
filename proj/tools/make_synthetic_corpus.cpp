// Writes the deterministic synthetic corpus as SSF.
//
//   make_synthetic_corpus --output corpus.ssf [--sentences 700] [--seed N]

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "shallowlab/io.hpp"
#include "shallowlab/ssf.hpp"
#include "shallowlab/synthetic.hpp"

int main(int argc, char** argv) {
  CLI::App app{"generate the synthetic SSF corpus", "make_synthetic_corpus"};
  std::string output;
  shallowlab::synthetic::Options options;
  app.add_option("--output", output)->required();
  app.add_option("--sentences", options.sentences)->capture_default_str();
  app.add_option("--seed", options.seed)->capture_default_str();
  CLI11_PARSE(app, argc, argv);
  try {
    shallowlab::io::write_file_atomic(
        output, shallowlab::serialize_ssf(shallowlab::synthetic::make_corpus(options)));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
