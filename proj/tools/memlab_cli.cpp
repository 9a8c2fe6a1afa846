#include "memlab/cli.hpp"

int main(int argc, char** argv) { return memlab::cli::run(argc, argv); }
