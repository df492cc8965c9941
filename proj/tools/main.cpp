#include <iostream>

#include "hartogs/cli.hpp"

int main(int argc, char** argv) { return hartogs::cli::run(argc, argv, std::cout, std::cerr); }
