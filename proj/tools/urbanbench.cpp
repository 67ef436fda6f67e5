#include "urbanbench/cli/app.hpp"

int main(int argc, char** argv) { return urbanbench::cli::run_cli(argc, argv); }
