#include <iostream>

#include "ncsq/cli.hpp"

int main(int argc, char** argv) { return ncsq::cli::run(argc, argv, std::cout, std::cerr); }
