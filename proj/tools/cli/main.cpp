#include "cli.hpp"

int main(int argc, char** argv) { return huberbench::cli::run_cli(argc, argv); }
