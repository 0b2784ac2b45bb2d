#include <iostream>

#include "besselrad/cli.hpp"

int main(int argc, char** argv) { return besselrad::cli::run_cli(argc, argv, std::cout, std::cerr); }
