#include <iostream>

#include "annuity_cli/cli.hpp"

int main(int argc, char** argv) { return annuity::cli::run(argc, argv, std::cout, std::cerr); }
