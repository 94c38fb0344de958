#include "elo/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return elo::cli::run(argc, argv, std::cout, std::cerr); }
