#include <iostream>

#include "tailbound/cli.hpp"

int main(int argc, char** argv) { return tailbound::cli::run(argc, argv, std::cout, std::cerr); }
