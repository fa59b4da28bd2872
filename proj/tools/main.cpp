#include "dualsmooth/cli.hpp"

int main(int argc, char** argv) { return dualsmooth::cli::run(argc, argv); }
