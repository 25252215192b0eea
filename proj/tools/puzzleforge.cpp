#include "puzzleforge/cli/commands.hpp"

int main(int argc, char** argv) { return puzzleforge::cli::run_cli(argc, argv); }
