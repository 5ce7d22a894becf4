#include <iostream>

#include "qcbridge/bridge_cli.hpp"

int main(int argc, char** argv) { return qcbridge::cli::run(argc, argv, std::cout, std::cerr); }
