#include <iostream>

#include "samp_cli/cli.hpp"

int main(int argc, char** argv) { return samp::cli::run_cli(argc, argv, std::cout, std::cerr); }
