#include <iostream>

#include "tfl/cli/app.hpp"

int main(int argc, char** argv) { return tfl::cli::run(argc, argv, std::cout, std::cerr); }
