#include <iostream>

#include "majorana/cli/commands.hpp"

int main(int argc, char** argv) { return majorana::cli::run(argc, argv, std::cout, std::cerr); }
