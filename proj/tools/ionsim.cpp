#include <iostream>

#include "ionsim/cli.hpp"

int main(int argc, char** argv) { return ionsim::cli::run(argc, argv, std::cout, std::cerr); }
