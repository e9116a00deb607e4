#include "basinlab/cli/app.hpp"

#include <iostream>

int main(int argc, char** argv) { return basinlab::cli::run(argc, argv, std::cout, std::cerr); }
