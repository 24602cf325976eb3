#include "gridscan/cli.hpp"

int main(int argc, char** argv) { return gridscan::cli::run(argc, argv); }
