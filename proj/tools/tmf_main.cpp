#include <iostream>

#include "tmf/cli.hpp"

int main(int argc, char** argv) { return tmf::cli::run(argc, argv, std::cin, std::cout, std::cerr); }
