#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) { return liposim::cli::cli_main(argc, argv, std::cin, std::cout, std::cerr); }
