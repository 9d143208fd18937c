#include "rcsep/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return rcsep::run_cli(argc, argv, std::cout, std::cerr);
}
