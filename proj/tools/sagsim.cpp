#include "sagsim/cli.hpp"

int main(int argc, char** argv) { return sagsim::cli::run_cli(argc, argv); }
