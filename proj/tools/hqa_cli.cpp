#include "hqa/cli.hpp"

int main(int argc, char** argv) { return hqa::cli::run_cli(argc, argv); }
