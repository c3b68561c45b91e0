#include "twistbeam/cli.hpp"

int main(int argc, char** argv) { return twistbeam::cli::run(argc, argv); }
