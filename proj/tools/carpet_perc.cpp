#include <iostream>

#include "carpetperc/cli.hpp"

int main(int argc, char** argv) { return carpetperc::cli::run(argc, argv, std::cout, std::cerr); }
