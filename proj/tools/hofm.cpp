#include <iostream>

#include "hofm/cli.hpp"

int main(int argc, char** argv) { return hofm::cli::run(argc, argv, std::cout, std::cerr); }
