#include <iostream>

#include "fprlab_cli.hpp"

int main(int argc, char** argv) { return fprlab::cli::run(argc, argv, std::cout, std::cerr); }
