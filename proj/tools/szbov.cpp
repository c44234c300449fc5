#include <iostream>

#include "szbov/cli.hpp"

int main(int argc, char** argv) { return szbov::cli::run(argc, argv, std::cout, std::cerr); }
