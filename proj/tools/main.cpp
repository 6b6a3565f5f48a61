#include <iostream>

#include "rla/cli.hpp"

int main(int argc, char** argv) { return rla::cli::run(argc, argv, std::cout, std::cerr); }
