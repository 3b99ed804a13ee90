#include <iostream>

#include "airhands/cli.hpp"

int main(int argc, char** argv) { return airhands::cli::run(argc, argv, std::cout, std::cerr); }
