#include "tokenfin/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return tokenfin::run_cli(argc, argv, std::cout, std::cerr);
}
