#include <iostream>

#include "netgrad_cli/app.hpp"

int main(int argc, char** argv) { return netgrad::cli::run_app(argc, argv, std::cout, std::cerr); }
