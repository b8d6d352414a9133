#include <iostream>

#include "gravipose/cli.hpp"

int main(int argc, char** argv) { return gravipose::cli::run(argc, argv, std::cout, std::cerr); }
