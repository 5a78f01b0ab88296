#include <iostream>

#include "feederflow/io.hpp"

int main(int argc, char** argv) { return feederflow::run_cli(argc, argv, std::cout, std::cerr); }
