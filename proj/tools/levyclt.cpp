#include <iostream>

#include "levyclt/cli.hpp"

int main(int argc, char** argv) { return levyclt::cli::run_cli(argc, argv, std::cout, std::cerr); }
