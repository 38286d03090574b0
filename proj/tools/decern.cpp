#include <iostream>

#include "decern/cli.hpp"

int main(int argc, char** argv) {
    return decern::run_cli(argc, argv, std::cout, std::cerr);
}
