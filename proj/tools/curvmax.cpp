#include <iostream>

#include "curvmax/cli.hpp"

int main(int argc, char** argv) { return curvmax::cli::run(argc, argv, std::cout, std::cerr); }
