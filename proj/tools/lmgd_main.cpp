#include <iostream>

#include "lmgd/cli.hpp"

int main(int argc, char** argv) { return lmgd::cli::run(argc, argv, std::cout, std::cerr); }
