#include <iostream>

#include "bdfdoc/cli.hpp"

int main(int argc, char** argv) { return bdfdoc::cli::run_cli(argc, argv, std::cout, std::cerr); }
