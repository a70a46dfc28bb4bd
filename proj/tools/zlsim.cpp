#include <iostream>

#include "zlsim/cli.hpp"

int main(int argc, char** argv) { return zlsim::cli::run_cli(argc, argv, std::cout, std::cerr); }
