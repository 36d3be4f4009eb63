#include <iostream>

#include "paraeval/cli/commands.hpp"

int main(int argc, char** argv) { return paraeval::cli::run_cli(argc, argv, std::cout, std::cerr); }
