#include "shallowlab/cli.hpp"

int main(int argc, char** argv) { return shallowlab::cli::run(argc, argv); }
