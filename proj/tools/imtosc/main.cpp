#include "imtosc/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return imtosc::cli::run(argc, argv, std::cout, std::cerr); }
